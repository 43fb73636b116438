// Acceptance suite: criteria 1..8 from the library checks, criterion 9 by
// rerunning the whole suite and comparing the serialized reports byte for byte.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include "hkglue/checks.hpp"

namespace {

void print_line(bool pass, int id, const std::string& title, double seconds, const std::string& detail) {
  std::printf("%s %d %s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", id, title.c_str(), seconds, detail.empty() ? "" : ": ",
              detail.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hkglue acceptance suite"};
  std::uint64_t seed = 7;
  std::string out;
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "write the serialized report here");
  CLI11_PARSE(app, argc, argv);

  const auto first = hkglue::run_all_checks(seed);
  bool all = true;
  for (const auto& r : first) {
    std::string detail;
    for (const auto& f : r.failures) detail += (detail.empty() ? "" : "; ") + f;
    if (detail.empty())
      for (const auto& m : r.metrics) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s%s=%.4g", detail.empty() ? "" : " ", m.key.c_str(), m.value);
        detail += buf;
      }
    print_line(r.pass, r.id, r.title, r.seconds, detail);
    all = all && r.pass;
  }

  const std::string a = hkglue::serialize(first);
  const auto second = hkglue::run_all_checks(seed);
  const std::string b = hkglue::serialize(second);
  double t2 = 0.0;
  for (const auto& r : second) t2 += r.seconds;
  const bool same = a == b;
  print_line(same, 9, "determinism", t2, same ? std::to_string(a.size()) + " identical bytes" : "reports differ");
  all = all && same;

  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    f << "schema=1\nseed=" << seed << '\n' << a;
  }
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
