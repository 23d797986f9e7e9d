#pragma once

#include <optional>
#include <string>

namespace leanopt {

// The eight supported problem categories. The first six have tailored
// modeling workflows; Others and Mixture route to the general workflow.
enum class ProblemType { NRM, RA, TP, FLP, AP, SBLP, Others, Mixture };

constexpr ProblemType kAllProblemTypes[] = {
    ProblemType::NRM, ProblemType::RA,   ProblemType::TP,     ProblemType::FLP,
    ProblemType::AP,  ProblemType::SBLP, ProblemType::Others, ProblemType::Mixture};

// Short code, e.g. "NRM"
std::string type_code(ProblemType type);
// Long form, e.g. "Network Revenue Management"
std::string type_name(ProblemType type);

// Accepts a short code or long name, case-insensitively, ignoring surrounding
// whitespace and a trailing period. Returns nullopt for anything else.
std::optional<ProblemType> parse_type(const std::string& text);

}  // namespace leanopt
