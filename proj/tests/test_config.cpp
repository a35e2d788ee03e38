#include <gtest/gtest.h>

#include "stochlim/io/config.hpp"
#include "stochlim/io/writers.hpp"

using namespace stochlim;
using namespace stochlim::io;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::capability;  // sentinel: no error
}

std::string message_of(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c;
  EXPECT_EQ(parse(serialize(c)), c);
  EXPECT_EQ(parse(""), c);
}

TEST(Config, ParsesValuesAndComments) {
  const auto c = parse(
      "# header\n"
      "profile.kind = massive   # trailing\n"
      "profile.mass = 0.25\n"
      "expansion.lambda = 0.4, 0.2 ,0.1\n"
      "\n"
      "spinboson.profile.half_line = true\n"
      "fock.points = 32\n");
  EXPECT_EQ(c.profile.kind, "massive");
  EXPECT_EQ(c.profile.mass, 0.25);
  EXPECT_EQ(c.expansion_lambda, (std::vector<double>{0.4, 0.2, 0.1}));
  EXPECT_TRUE(c.spinboson_profile.half_line);
  EXPECT_EQ(c.fock_points, 32);
  EXPECT_EQ(parse(serialize(c)), c);
}

TEST(Config, NonTerminatingDecimalsRoundTrip) {
  RunConfig c;
  c.tol_gap = 1.0 / 3.0;
  c.model_t = {0.1, 0.7, 2.0 / 7.0};
  EXPECT_EQ(parse(serialize(c)), c);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(kind_of("profile.colour = red\n"), ErrorKind::config);
  EXPECT_NE(message_of("profile.colour = red\n").find("profile.colour"), std::string::npos);
  EXPECT_NE(message_of("tol.gap = abc\n").find("tol.gap"), std::string::npos);
  EXPECT_NE(message_of("tol.gap = -1\n").find("tol.gap"), std::string::npos);
  EXPECT_NE(message_of("model.kind = quantum\n").find("model.kind"), std::string::npos);
  EXPECT_NE(message_of("fock.points = 2.5\n").find("fock.points"), std::string::npos);
  EXPECT_EQ(kind_of("just words\n"), ErrorKind::config);
  EXPECT_EQ(kind_of("model.rwa_d = 1, 2\n"), ErrorKind::config);
}

TEST(Config, ProfileConstruction) {
  ProfileSpec p;
  const auto rho = make_profile(p);
  EXPECT_NEAR(rho(2.0), 1.0, 1e-15);
  p.kind = "massless";
  p.center = 0.0;
  p.width = 0.5;
  const auto r3 = make_profile(p);
  EXPECT_EQ(r3.support_lo(), 0.0);
  EXPECT_GT(r3(1.0), 0.0);
}

TEST(Writers, FloatFormatting) {
  EXPECT_EQ(format_double(1.0), "1.0000000000000000e+00");
  EXPECT_EQ(format_double(-0.1), "-1.0000000000000001e-01");
  EXPECT_EQ(format_double(std::nan("")), "null");
  Json j;
  j["a"] = 0.5;
  j["b"] = Json::array({1, 2});
  j["c"] = "x";
  EXPECT_EQ(dump_json(j), "{\n  \"a\": 5.0000000000000000e-01,\n  \"b\": [1, 2],\n  \"c\": \"x\"\n}\n");
  CsvTable t({"x", "y"});
  t.add_row({1.0, 2.0});
  EXPECT_EQ(t.str(), "x,y\n1.0000000000000000e+00,2.0000000000000000e+00\n");
  EXPECT_THROW(t.add_row({1.0}), Error);
}
