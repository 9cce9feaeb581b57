#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace crashnet;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Qubo two_variable() {
  Qubo q(2);
  q.add_linear(0, 1);
  q.add_linear(1, 1);
  q.add_quadratic(0, 1, -2);
  return q;
}

Qubo linear_seventy() {
  const auto net = generate_random_network(10, 12, 1.0, 10.0, 5);
  return qubo_from_polynomial(build_hubo(net, std::nullopt, BitSpec{0, 6}));
}

std::string parse_message(const std::string& text) {
  try {
    read_qubo_string(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(QuboFormat, GoldenFixture) {
  const std::string golden = slurp(CRASHNET_TEST_DATA "/two_variable.qubo");
  EXPECT_EQ(write_qubo_string(two_variable()), golden);
  EXPECT_EQ(read_qubo_string(golden), two_variable());
  EXPECT_EQ(write_qubo_string(read_qubo_string(golden)), golden);
}

TEST(QuboFormat, SeventyVariableRoundTrip) {
  const Qubo q = linear_seventy();
  ASSERT_EQ(q.size(), 70u);
  ASSERT_EQ(q.quadratic().size(), 210u);
  const std::string text = write_qubo_string(q);
  const Qubo back = read_qubo_string(text);
  EXPECT_EQ(back, q);
  EXPECT_EQ(back.offset(), q.offset());
  EXPECT_EQ(write_qubo_string(back), text);

  const auto path = (std::filesystem::temp_directory_path() / "crashnet_roundtrip.qubo").string();
  write_qubo_file(q, path);
  EXPECT_EQ(read_qubo_file(path), q);
  std::filesystem::remove(path);
}

TEST(QuboFormat, RandomRoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Qubo q = testing_support::random_qubo(15, 0.4, seed);
    q.set_offset(std::ldexp(1.0, -30) * static_cast<double>(seed) + 1.0 / 3.0);
    const Qubo back = read_qubo_string(write_qubo_string(q));
    EXPECT_EQ(back, q);
    EXPECT_EQ(back.offset(), q.offset());
  }
}

TEST(QuboFormat, AncillaRegistrySurvives) {
  SpinPolynomial sp(4);
  sp.add_term({0, 1, 2}, 0.5);
  sp.add_term({1, 2, 3}, -0.25);
  const Qubo q = quadratize(sp);
  const Qubo back = read_qubo_string(write_qubo_string(q));
  EXPECT_EQ(back, q);
  ASSERT_EQ(back.ancillas().size(), q.ancillas().size());
  for (const auto& [id, info] : q.ancillas()) {
    EXPECT_EQ(back.ancillas().at(id).source_term, info.source_term);
    EXPECT_EQ(back.ancillas().at(id).kind, info.kind);
  }
}

TEST(QuboFormat, ParseErrors) {
  const std::string miscount = "p qubo 0 2 2 3\n0 0 1\n1 1 1\n0 1 -2\n";
  const auto msg = parse_message(miscount);
  EXPECT_NE(msg.find("3 couplers"), std::string::npos) << msg;

  EXPECT_NE(parse_message("0 0 1\np qubo 0 1 1 0\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_message("p qubo 0 2 1 1\n0 0 1\n1 0 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_message("p qubo 0 2 1 1\n0 0 1\n0 5 2\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_message("p qubo 0 2 1 1\n0 0 x\n0 1 2\n").find("line 2"), std::string::npos);
  EXPECT_FALSE(parse_message("c nothing\n").empty());
  EXPECT_THROW(read_qubo_file("/nonexistent/file.qubo"), Error);
}
