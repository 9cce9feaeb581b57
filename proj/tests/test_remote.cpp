#include <gtest/gtest.h>

#include <thread>

#include "support.hpp"

using namespace crashnet;

namespace {

AnnealSchedule schedule_for(const Qubo& q) {
  AnnealSchedule s = AnnealSchedule::defaults_for(q);
  s.reads = 8;
  s.sweeps = 200;
  return s;
}

/// Serves @p sampler on a loopback port for the lifetime of the object.
class LoopbackServer {
 public:
  explicit LoopbackServer(std::function<void(httplib::Server&)> mount) {
    mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LoopbackServer() {
    server_.stop();
    thread_.join();
  }
  RemoteConfig config() const {
    RemoteConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_);
    c.timeout_seconds = 10;
    return c;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(Remote, LoopbackMatchesLocalSampler) {
  Qubo q = testing_support::random_qubo(12, 0.4, 21);
  q.set_offset(3.5);
  auto sampler = [](const Qubo& p, std::size_t reads) {
    AnnealSchedule s = schedule_for(p);
    s.reads = reads;
    return simulated_annealing(p, s, 17, {false, 1});
  };
  LoopbackServer server([&](httplib::Server& s) { mount_sampler(s, sampler); });
  const SampleSet remote = remote_sample(server.config(), q, 8);
  const SampleSet local = sampler(q, 8);
  ASSERT_EQ(remote.samples.size(), local.samples.size());
  for (std::size_t i = 0; i < local.samples.size(); ++i) {
    EXPECT_EQ(remote.samples[i].assignment, local.samples[i].assignment);
    EXPECT_EQ(remote.samples[i].occurrences, local.samples[i].occurrences);
    EXPECT_NEAR(remote.samples[i].energy, local.samples[i].energy, 1e-9);
    EXPECT_EQ(remote.samples[i].source, "remote");
  }
  EXPECT_EQ(remote.best, local.best);
}

TEST(Remote, WrongEnergyNamesSample) {
  const Qubo q = testing_support::random_qubo(6, 0.5, 4);
  LoopbackServer server([](httplib::Server& s) {
    s.Post(kSamplePath, [](const httplib::Request&, httplib::Response& res) {
      const nlohmann::json reply = {{"samples", {{0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0}}},
                                    {"energies", {0.0, 1234.5}},
                                    {"occurrences", {1, 1}}};
      res.set_content(reply.dump(), "application/json");
    });
  });
  try {
    remote_sample(server.config(), q, 2);
    FAIL() << "expected RemoteError";
  } catch (const RemoteError& e) {
    EXPECT_NE(std::string(e.what()).find("sample 1"), std::string::npos) << e.what();
  }
}

TEST(Remote, MalformedResponses) {
  const Qubo q = testing_support::random_qubo(3, 0.5, 4);
  LoopbackServer server([](httplib::Server& s) {
    s.Post(kSamplePath, [](const httplib::Request& req, httplib::Response& res) {
      const auto n = nlohmann::json::parse(req.body).at("reads").get<int>();
      if (n == 1) res.set_content("not json", "application/json");
      else if (n == 2) res.set_content(R"({"samples":[[0,2,0]],"energies":[0],"occurrences":[1]})", "application/json");
      else if (n == 3) res.set_content(R"({"samples":[[0,0]],"energies":[0],"occurrences":[1]})", "application/json");
      else res.status = 503;
    });
  });
  for (std::size_t reads : {1, 2, 3, 4}) EXPECT_THROW(remote_sample(server.config(), q, reads), RemoteError);
}

TEST(Remote, BadRequestGets400) {
  LoopbackServer server([](httplib::Server& s) {
    mount_sampler(s, [](const Qubo& p, std::size_t) { return exhaustive_solve(p); });
  });
  httplib::Client client(server.config().endpoint);
  auto res = client.Post(kSamplePath, R"({"size":2,"linear":[1]})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST(Remote, UnreachableEndpoint) {
  RemoteConfig c;
  c.endpoint = "http://127.0.0.1:1";
  c.timeout_seconds = 1;
  c.retries = 1;
  EXPECT_THROW(remote_sample(c, Qubo(2), 1), RemoteError);
  EXPECT_THROW(remote_sample(RemoteConfig{}, Qubo(2), 1), RemoteError);
}

TEST(Remote, DecomposeThroughRemoteSubsolver) {
  const Qubo q = testing_support::random_qubo(14, 0.4, 8);
  auto exact = [](const Qubo& p) {
    ExhaustiveSolveOptions o;
    o.max_stored_minimizers = 1;
    return exhaustive_solve(p, o);
  };
  LoopbackServer server([&](httplib::Server& s) {
    mount_sampler(s, [&](const Qubo& p, std::size_t) { return exact(p); });
  });
  DecomposeOptions o;
  o.subproblem_size = 7;
  o.reads = 3;
  o.subsolver = Subsolver::custom;
  o.custom = remote_subsolver(server.config(), 1);
  const SampleSet remote = decompose_solve(q, o);
  o.custom = [&](const Qubo& p, std::uint64_t) { return exact(p); };
  const SampleSet local = decompose_solve(q, o);
  ASSERT_EQ(remote.samples.size(), local.samples.size());
  for (std::size_t i = 0; i < local.samples.size(); ++i)
    EXPECT_EQ(remote.samples[i].assignment, local.samples[i].assignment);
}
