#include "freemax/distparse.hpp"

#include <charconv>
#include <stdexcept>
#include <vector>

#include "freemax/csvio.hpp"

namespace freemax {

namespace {

[[noreturn]] void fail(const std::string& spec, const char* why) {
  throw std::invalid_argument("distribution spec `" + spec + "`: " + why);
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && s[b] == ' ') ++b;
  while (e > b && s[e - 1] == ' ') --e;
  return s.substr(b, e - b);
}

double to_number(const std::string& spec, const std::string& tok) {
  const std::string t = strip(tok);
  double v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail(spec, "expected a number");
  return v;
}

std::vector<std::string> split(const std::string& body) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == ',') {
      out.push_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

Cdf parse_distribution(const std::string& spec) {
  const std::string s = strip(spec);
  const auto lp = s.find('(');
  if (lp == std::string::npos || s.back() != ')') fail(spec, "expected name(args)");
  const std::string name = strip(s.substr(0, lp));
  const std::string body = s.substr(lp + 1, s.size() - lp - 2);
  const auto args = split(body);

  auto want = [&](std::size_t n) {
    if (args.size() != n) fail(spec, "wrong number of arguments");
  };

  if (name == "uniform") {
    want(2);
    return Cdf::uniform(to_number(spec, args[0]), to_number(spec, args[1]));
  }
  if (name == "gumbel") {
    want(2);
    return Cdf::gumbel(to_number(spec, args[0]), to_number(spec, args[1]));
  }
  if (name == "frechet") {
    want(3);
    return Cdf::frechet(to_number(spec, args[0]), to_number(spec, args[1]),
                        to_number(spec, args[2]));
  }
  if (name == "weibull") {
    want(3);
    return Cdf::weibull(to_number(spec, args[0]), to_number(spec, args[1]),
                        to_number(spec, args[2]));
  }
  if (name == "exponential") {
    want(1);
    return Cdf::exponential(to_number(spec, args[0]));
  }
  if (name == "atomic") {
    if (args.empty() || (args.size() == 1 && strip(args[0]).empty()))
      fail(spec, "atomic needs x:mass pairs");
    std::vector<std::pair<double, double>> pts;
    for (const auto& a : args) {
      const auto colon = a.find(':');
      if (colon == std::string::npos) fail(spec, "atomic needs x:mass pairs");
      pts.emplace_back(to_number(spec, a.substr(0, colon)),
                       to_number(spec, a.substr(colon + 1)));
    }
    return Cdf::atomic(std::move(pts));
  }
  if (name == "empirical") {
    want(1);
    return empirical_cdf(csv::read_values(strip(args[0])));
  }
  fail(spec, "unknown family");
}

}  // namespace freemax
