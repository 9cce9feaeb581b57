/// @file remote.hpp
/// @brief HTTP client for an external sampler plus the matching request
/// handler, so any local solver can be served over the same protocol.
/// @details POST /v1/sample with
///   {"size": n, "linear": [...], "quadratic": [[i, j, v], ...], "reads": r}
/// answered by
///   {"samples": [[0,1,...], ...], "energies": [...], "occurrences": [...]}.
/// The offset is not sent; reported energies exclude it.

#pragma once
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "crashnet/error.hpp"
#include "crashnet/solver/sample_set.hpp"

namespace crashnet {

inline constexpr const char* kSamplerUrlEnv = "CRASHNET_SAMPLER_URL";
inline constexpr const char* kSamplePath = "/v1/sample";

struct RemoteConfig {
  std::string endpoint;  ///< scheme://host:port
  double timeout_seconds = 30.0;
  std::size_t retries = 2;  ///< extra attempts after a transport failure
  double energy_tolerance = 1e-6;

  /// Endpoint from CRASHNET_SAMPLER_URL, if set.
  static std::optional<RemoteConfig> from_environment() {
    const char* url = std::getenv(kSamplerUrlEnv);
    if (!url || !*url) return std::nullopt;
    RemoteConfig c;
    c.endpoint = url;
    return c;
  }
};

inline nlohmann::json sample_request(const Qubo& q, std::size_t reads) {
  nlohmann::json quad = nlohmann::json::array();
  for (const auto& [ij, v] : q.quadratic()) quad.push_back({ij.first, ij.second, v});
  return {{"size", q.size()}, {"linear", q.linear()}, {"quadratic", quad}, {"reads", reads}};
}

/// Server side: parses a request body, runs @p sampler, returns the reply.
/// Throws ParseError on a malformed request.
inline nlohmann::json handle_sample_request(
    const std::string& body,
    const std::function<SampleSet(const Qubo&, std::size_t reads)>& sampler) {
  nlohmann::json req;
  try {
    req = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sample request: ") + e.what());
  }
  Qubo q;
  std::size_t reads = 0;
  try {
    const auto size = req.at("size").get<std::size_t>();
    const auto linear = req.at("linear").get<std::vector<double>>();
    if (linear.size() != size) throw ParseError("sample request: linear has wrong length");
    q = Qubo(size);
    for (std::size_t i = 0; i < size; ++i) q.add_linear(static_cast<VarId>(i), linear[i]);
    for (const auto& t : req.at("quadratic")) {
      if (!t.is_array() || t.size() != 3) throw ParseError("sample request: bad quadratic triplet");
      q.add_quadratic(t[0].get<VarId>(), t[1].get<VarId>(), t[2].get<double>());
    }
    reads = req.at("reads").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sample request: ") + e.what());
  } catch (const ParameterError& e) {
    throw ParseError(std::string("sample request: ") + e.what());
  }
  const SampleSet set = sampler(q, reads);
  nlohmann::json samples = nlohmann::json::array();
  nlohmann::json energies = nlohmann::json::array();
  nlohmann::json occ = nlohmann::json::array();
  for (const auto& s : set.samples) {
    samples.push_back(s.assignment);
    energies.push_back(s.energy - q.offset());
    occ.push_back(s.occurrences);
  }
  return {{"samples", samples}, {"energies", energies}, {"occurrences", occ}};
}

/// Registers the sample route on @p server.
inline void mount_sampler(httplib::Server& server,
                          std::function<SampleSet(const Qubo&, std::size_t)> sampler) {
  server.Post(kSamplePath, [sampler = std::move(sampler)](const httplib::Request& req,
                                                           httplib::Response& res) {
    try {
      res.set_content(handle_sample_request(req.body, sampler).dump(), "application/json");
    } catch (const Error& e) {
      res.status = e.kind() == ErrorKind::parse ? 400 : 500;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });
}

/// Client side. Every returned energy is checked against local
/// recomputation; the offset is added back on return.
inline SampleSet remote_sample(const RemoteConfig& cfg, const Qubo& q, std::size_t reads) {
  if (cfg.endpoint.empty()) throw RemoteError("remote_sample: no endpoint configured");
  if (reads < 1) throw ParameterError("remote_sample: reads must be >= 1");
  Stopwatch clock;
  const std::string body = sample_request(q, reads).dump();

  httplib::Result result{nullptr, httplib::Error::Unknown};
  std::size_t attempts = 0;
  for (; attempts <= cfg.retries; ++attempts) {
    httplib::Client client(cfg.endpoint);
    const auto t = std::chrono::duration<double>(cfg.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
    result = client.Post(kSamplePath, body, "application/json");
    if (result) break;
    if (attempts < cfg.retries)
      std::this_thread::sleep_for(std::chrono::milliseconds(50 * (attempts + 1)));
  }
  if (!result)
    throw RemoteError("remote_sample: transport failure contacting " + cfg.endpoint + ": " +
                      httplib::to_string(result.error()));
  if (result->status != 200)
    throw RemoteError("remote_sample: HTTP " + std::to_string(result->status) + ": " +
                      result->body);

  std::vector<std::vector<std::uint8_t>> assignments;
  std::vector<std::size_t> occurrences;
  try {
    const auto reply = nlohmann::json::parse(result->body);
    const auto& samples = reply.at("samples");
    const auto& energies = reply.at("energies");
    const auto& occ = reply.at("occurrences");
    if (!samples.is_array() || samples.size() != energies.size() || samples.size() != occ.size())
      throw RemoteError("remote_sample: malformed response (array lengths differ)");
    if (samples.empty()) throw RemoteError("remote_sample: malformed response (no samples)");
    for (std::size_t s = 0; s < samples.size(); ++s) {
      auto x = samples[s].get<std::vector<int>>();
      if (x.size() != q.size())
        throw RemoteError("remote_sample: sample " + std::to_string(s) + " has " +
                          std::to_string(x.size()) + " bits, expected " + std::to_string(q.size()));
      std::vector<std::uint8_t> bits(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0 && x[i] != 1)
          throw RemoteError("remote_sample: sample " + std::to_string(s) + " is not binary");
        bits[i] = static_cast<std::uint8_t>(x[i]);
      }
      const double local = q.energy(bits) - q.offset();
      const double reported = energies[s].get<double>();
      if (!(std::abs(local - reported) <= cfg.energy_tolerance * std::max(1.0, std::abs(local))))
        throw RemoteError("remote_sample: energy mismatch at sample " + std::to_string(s) +
                          " (reported " + std::to_string(reported) + ", recomputed " +
                          std::to_string(local) + "); response treated as corrupt");
      assignments.push_back(std::move(bits));
      occurrences.push_back(occ[s].get<std::size_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw RemoteError(std::string("remote_sample: malformed response: ") + e.what());
  }

  SolverMetadata meta;
  meta.solver = "remote";
  meta.reads = reads;
  meta.extra["attempts"] = static_cast<double>(attempts + 1);
  meta.wall_time_seconds = clock.seconds();
  return make_sample_set(q, assignments, occurrences, "remote", std::move(meta));
}

/// Subsolver adapter for decompose_solve: one request per sub-QUBO.
inline std::function<SampleSet(const Qubo&, std::uint64_t)> remote_subsolver(RemoteConfig cfg,
                                                                             std::size_t reads) {
  return [cfg = std::move(cfg), reads](const Qubo& q, std::uint64_t) {
    return remote_sample(cfg, q, reads);
  };
}

}  // namespace crashnet
