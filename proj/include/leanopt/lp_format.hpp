#pragma once

#include <string>

#include "leanopt/model.hpp"

namespace leanopt {

struct LpParseError : std::runtime_error {
    int line = 0;
    LpParseError(const std::string& msg, int line_no)
        : std::runtime_error("LP parse error at line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
};

// CPLEX-style LP text. write_lp requires a valid model; read_lp validates.
std::string write_lp(const LinearModel& model);
LinearModel read_lp(const std::string& text);

}  // namespace leanopt
