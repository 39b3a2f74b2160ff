#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "sharpfront/acceptance.hpp"

int main(int argc, char** argv) {
  sharpfront::acceptance::Options opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--no-simulator") == 0) opt.simulator = false;
    else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) opt.criteria.push_back(std::atoi(argv[++i]));
  }
  bool all = true;
  sharpfront::acceptance::run(opt, [&](const sharpfront::acceptance::CriterionResult& r) {
    std::printf("%s\n", sharpfront::acceptance::format_line(r).c_str());
    std::fflush(stdout);
    all = all && r.passed;
  });
  return all ? 0 : 1;
}
