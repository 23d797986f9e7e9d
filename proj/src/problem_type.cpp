#include "leanopt/problem_type.hpp"

#include <cctype>

namespace leanopt {

std::string type_code(ProblemType type) {
    switch (type) {
        case ProblemType::NRM: return "NRM";
        case ProblemType::RA: return "RA";
        case ProblemType::TP: return "TP";
        case ProblemType::FLP: return "FLP";
        case ProblemType::AP: return "AP";
        case ProblemType::SBLP: return "SBLP";
        case ProblemType::Others: return "Others";
        case ProblemType::Mixture: return "Mixture";
    }
    return "Others";
}

std::string type_name(ProblemType type) {
    switch (type) {
        case ProblemType::NRM: return "Network Revenue Management";
        case ProblemType::RA: return "Resource Allocation";
        case ProblemType::TP: return "Transportation";
        case ProblemType::FLP: return "Facility Location Problem";
        case ProblemType::AP: return "Assignment Problem";
        case ProblemType::SBLP: return "Sales-Based Linear Programming";
        case ProblemType::Others: return "Others";
        case ProblemType::Mixture: return "Mixture";
    }
    return "Others";
}

std::optional<ProblemType> parse_type(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) t += (char)std::tolower((unsigned char)c);
    while (!t.empty() && t.back() == '.') t.pop_back();
    for (ProblemType type : kAllProblemTypes) {
        std::string code, name;
        for (char c : type_code(type)) code += (char)std::tolower((unsigned char)c);
        for (char c : type_name(type))
            if (!std::isspace((unsigned char)c)) name += (char)std::tolower((unsigned char)c);
        if (t == code || t == name) return type;
    }
    // common long-form variants
    if (t == "transportationproblem") return ProblemType::TP;
    if (t == "resourceallocationproblem") return ProblemType::RA;
    if (t == "facilitylocation") return ProblemType::FLP;
    if (t == "salesbasedlinearprogramming") return ProblemType::SBLP;
    return std::nullopt;
}

}  // namespace leanopt
