#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ltunnel/cli_io.hpp"

using namespace ltunnel;
using namespace ltunnel::io;
namespace fs = std::filesystem;

namespace {

std::string read(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string temp_prefix(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("ltunnel_unit_" + tag);
  fs::create_directories(dir);
  return (dir / "run").string();
}

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("defaults are the figure parameters") {
  const auto c = parse_config("{}");
  CHECK(c.mode == Mode::figure1);
  CHECK(c.X0() == -20.0);
  CHECK(c.P0() == 10.0);
  CHECK(c.L == 20.0);
  CHECK(c.k0_value() == 0.5);
  CHECK(c.V_dimless() == doctest::Approx(100.0));
  CHECK(c.D_dimless() == 1.0);
  CHECK(c.default_time() == doctest::Approx(2.2));
  CHECK(c.workers == 1);
}

TEST_CASE("normalized echo round-trips") {
  const auto c = parse_config(R"({"packet": {"x0": -30, "p0": 8, "L": 10}, "barrier": {"V": 100, "d": 0.5}})");
  const std::string echo = echo_config(c);
  CHECK(echo_config(parse_config(echo)) == echo);
  CHECK(echo_config(parse_config("{}")) == echo_config(parse_config(echo_config(parse_config("{}")))));
}

TEST_CASE("barrier given either way") {
  const auto a = parse_config(R"({"barrier": {"V": 100, "D": 0.4}})");
  CHECK(a.k0_value() == doctest::Approx(0.5));
  const auto b = parse_config(R"({"barrier": {"k0": 0.25, "d": 2}, "scales": {"a": 4}})");
  CHECK(b.D_dimless() == doctest::Approx(1.0));
  CHECK(b.V_dimless() == doctest::Approx(0.5 * b.P0() * b.P0() / 0.25));
  CHECK(error_path(R"({"barrier": {"V": 100, "k0": 0.5}})") == "barrier");
  CHECK(error_path(R"({"barrier": {"d": 1, "D": 1}})") == "barrier");
}

TEST_CASE("configuration errors name the offending key") {
  CHECK(error_path(R"({"barrier": {"k0": 1.2}})") == "barrier.k0");
  CHECK(error_path(R"({"packet": {"x0": -5, "L": 20}})") == "packet");
  CHECK(error_path(R"({"packet": {"L": 1.5}})") == "packet.L");
  CHECK(error_path(R"({"packet": {"p0": -1}})") == "packet.p0");
  CHECK(error_path(R"({"window": {"K": 1.5}})") == "window.K");
  CHECK(error_path(R"({"window": {"K": 0.9}})") == "window.K");
  CHECK(error_path(R"({"colour": 1})") == "colour");
  CHECK(error_path(R"({"packet": {"x0": -20, "x0": -21}})") == "packet.x0");
  CHECK(error_path(R"({"mode": "plot"})") == "mode");
  CHECK(error_path(R"({"workers": 0})") == "workers");
  CHECK(error_path(R"({"barrier": {"V": 0}})") == "barrier.V");
  CHECK(error_path(R"({"packet": {"x0": "far"}})") == "packet.x0");
  CHECK(error_path("{ not json") == "");
  try {
    parse_config(R"({"barrier": {"k0": 1.2}})");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sqrt(2 m V)") != std::string::npos);
  }
  // free control is allowed where it means something
  CHECK_NOTHROW(parse_config(R"({"mode": "compare", "barrier": {"V": 0}})"));
}

TEST_CASE("overrides") {
  const auto c = parse_config("{}", {"packet.L=30", "packet.x0=-40", "barrier.D=0.4", "output=\"x/y\"", "times=[2.0, 2.5]"});
  CHECK(c.L == 30.0);
  CHECK(c.D_dimless() == 0.4);
  CHECK(c.output == "x/y");
  CHECK(c.times.size() == 2);
  CHECK(parse_config("{}", {"output=bare"}).output == "bare");
  CHECK_THROWS_AS(parse_config("{}", {"noequals"}), ConfigError);
  CHECK_THROWS_AS(parse_config("{}", {"packet.bogus=1"}), ConfigError);
}

TEST_CASE("number and CSV formatting") {
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
  CHECK(format_number(-2.5) == "-2.5000000000000000e+00");
  CHECK(csv_header() == "x,t,re_psi,im_psi,abs2,region,source\n");
  const auto r = make_record(1.5, 2.0, cplx(3.0, -4.0), Region::right, "oracle");
  CHECK(r.abs2 == 25.0);
  const auto cfg = parse_config("{}");
  const std::string csv = format_csv({r}, cfg);
  CHECK(csv.rfind("# ltunnel 1.0.0 config={", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(csv.find("\n1.5000000000000000e+00,2.0000000000000000e+00,3.0000000000000000e+00,-4.0000000000000000e+00,"
                 "2.5000000000000000e+01,right,oracle\n") != std::string::npos);
}

TEST_CASE("parallel_for is deterministic and propagates errors") {
  std::vector<double> a(1000), b(1000);
  parallel_for(1, a.size(), [&](std::size_t i) { a[i] = std::sin(0.1 * i); });
  parallel_for(7, b.size(), [&](std::size_t i) { b[i] = std::sin(0.1 * i); });
  CHECK(a == b);
  CHECK_THROWS_AS(parallel_for(4, 10, [](std::size_t i) { if (i == 5) throw NumericError("x"); }), NumericError);
}

TEST_CASE("packet-info summary") {
  auto cfg = parse_config("{}");
  cfg.output = temp_prefix("info");
  const auto r = run_packet_info(cfg);
  CHECK(r.exit_code == 0);
  CHECK(r.summary_json.find("\"version\": \"ltunnel 1.0.0\"") != std::string::npos);
  CHECK(r.summary_json.find("\"config\"") != std::string::npos);
  CHECK(read(r.files.front()) == r.summary_json);
}

TEST_CASE("analytic pipeline writes region-tagged rows") {
  auto cfg = parse_config(R"({"mode": "analytic", "grid": {"min": -3, "max": 4, "n": 15}, "workers": 3})");
  cfg.output = temp_prefix("analytic");
  const auto r = run_analytic(cfg);
  const std::string csv = read(r.files.front());
  std::istringstream is(csv);
  std::string line;
  int rows = 0, left = 0, barrier = 0, right = 0;
  std::getline(is, line);
  std::getline(is, line);
  while (std::getline(is, line)) {
    ++rows;
    left += line.find(",left,") != std::string::npos;
    barrier += line.find(",barrier,") != std::string::npos;
    right += line.find(",right,") != std::string::npos;
  }
  CHECK(rows == 15);
  CHECK(left == 6);
  CHECK(barrier == 2);
  CHECK(right == 7);
  // same output on one worker
  auto one = cfg;
  one.workers = 1;
  one.output = temp_prefix("analytic1");
  const auto r1 = run_analytic(one);
  const std::string csv1 = read(r1.files.front());
  CHECK(csv.substr(csv.find('\n')) == csv1.substr(csv1.find('\n')));
}

TEST_CASE("compare refuses unsafe scenarios and flags the noise floor") {
  auto cfg = parse_config(R"({"mode": "compare", "barrier": {"k0": 0.5, "D": 2.0}})");
  cfg.output = temp_prefix("compare");
  CHECK_THROWS_AS(run_compare(cfg, false), ConfigError);
  const auto r = run_compare(cfg, true);
  CHECK(r.summary_json.find("below the double-precision noise floor") != std::string::npos);
}

TEST_CASE("validation table") {
  const auto rows = validate_suite();
  CHECK(rows.size() >= 15);
  for (const auto& r : rows) {
    INFO(r.name << " value " << r.value);
    CHECK(r.pass);
  }
  const std::string t = format_validation(rows);
  CHECK(t.rfind("PASS  ", 0) == 0);
}
