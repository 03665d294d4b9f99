#pragma once

#include <chrono>
#include <cstdio>
#include <string>

namespace acceptance {

/// Prints one PASS/FAIL line per criterion and remembers whether any failed.
class Verdicts {
public:
    void record(int id, const std::string& name, bool pass, const std::string& detail) {
        std::printf("%s  [%2d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
        std::fflush(stdout);
        failed_ = failed_ || !pass;
    }
    void blocked(int id, const std::string& name, const std::string& why) {
        std::printf("BLOCKED [%2d] %s: %s\n", id, name.c_str(), why.c_str());
        std::fflush(stdout);
    }
    bool failed() const { return failed_; }

private:
    bool failed_ = false;
};

inline std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace acceptance
