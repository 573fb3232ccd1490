// Scriptable stand-in for a verifier.
//
//   mockver <directive-file>
//
// Directives run in order, one per line:
//   sleep <s>        idle for s seconds of wall time
//   burn <s>         spin until this process has used s seconds of CPU
//   spawn-burn <s>   fork a child that burns s seconds; wait for it while idle
//   print <text>     write text and a newline to stdout
//   exit <code>      exit immediately with code
// Blank lines and lines starting with '#' are ignored. Reaching the end of
// the file exits 0.

#include <sys/wait.h>
#include <time.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

double cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) / 1e9;
}

void burn(double seconds) {
  const double until = cpu_seconds() + seconds;
  volatile unsigned long sink = 0;
  while (cpu_seconds() < until) {
    for (int i = 0; i < 100000; ++i) sink = sink + static_cast<unsigned long>(i);
  }
}

void idle(double seconds) {
  timespec ts{static_cast<time_t>(seconds), static_cast<long>((seconds - static_cast<double>(static_cast<time_t>(seconds))) * 1e9)};
  while (nanosleep(&ts, &ts) != 0) {
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: mockver <directive-file>\n");
    return 2;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::fprintf(stderr, "mockver: cannot open %s\n", argv[1]);
    return 2;
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream words(line);
    std::string op;
    words >> op;
    std::string rest;
    std::getline(words, rest);
    if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);

    if (op == "print") {
      std::cout << rest << std::endl;
      continue;
    }
    char* end = nullptr;
    const double value = std::strtod(rest.c_str(), &end);
    if (rest.empty() || end == rest.c_str()) {
      std::fprintf(stderr, "mockver: line %d: missing numeric argument\n", line_no);
      return 3;
    }
    if (op == "sleep") {
      idle(value);
    } else if (op == "burn") {
      burn(value);
    } else if (op == "spawn-burn") {
      std::cout.flush();
      pid_t child = fork();
      if (child < 0) return 4;
      if (child == 0) {
        burn(value);
        _exit(0);
      }
      int status = 0;
      waitpid(child, &status, 0);
    } else if (op == "exit") {
      std::cout.flush();
      return static_cast<int>(value);
    } else {
      std::fprintf(stderr, "mockver: line %d: unknown directive '%s'\n", line_no, op.c_str());
      return 3;
    }
  }
  return 0;
}
