#include "leanopt/refdata.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "leanopt/grammar.hpp"
#include "leanopt/lp_format.hpp"
#include "leanopt/solver.hpp"

namespace fs = std::filesystem;

namespace leanopt {

namespace {

std::string read_file(const fs::path& path, const std::string& id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RefError("entry '" + id + "': cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json load_manifest(const std::string& directory) {
    fs::path path = fs::path(directory) / "manifest.json";
    std::ifstream in(path);
    if (!in) throw RefError("missing manifest " + path.string());
    nlohmann::json manifest = nlohmann::json::parse(in, nullptr, false);
    if (manifest.is_discarded()) throw RefError("malformed JSON in " + path.string());
    return manifest;
}

}  // namespace

const RefEntry* RefStore::find(const std::string& id) const {
    for (const auto& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

long approx_tokens(const std::string& text) { return (long)(text.size() / 4); }

RefStore load_refdata(const std::string& directory) {
    nlohmann::json manifest = load_manifest(directory);
    RefStore store;
    std::set<std::string> ids;
    for (const auto& item : manifest.at("entries")) {
        RefEntry entry;
        entry.id = item.at("id").get<std::string>();
        if (!ids.insert(entry.id).second)
            throw RefError("duplicate entry id '" + entry.id + "'");
        auto type = parse_type(item.at("type").get<std::string>());
        if (!type) throw RefError("entry '" + entry.id + "': unknown type");
        entry.t = *type;
        entry.g = item.value("category", "");
        fs::path dir = fs::path(directory) / item.at("dir").get<std::string>();
        entry.q = read_file(dir / "query.txt", entry.id);
        entry.f = read_file(dir / "formatted.txt", entry.id);
        entry.m = read_file(dir / "label.txt", entry.id);
        if (entry.m.find("Retrieved Information:") != std::string::npos) {
            try {
                parse_model_grammar(entry.m);
            } catch (const GrammarError& e) {
                throw RefError("entry '" + entry.id + "': label does not parse: " + e.what());
            }
        }
        store.type_counts[entry.t]++;
        store.entries.push_back(std::move(entry));
    }
    return store;
}

LinearModel BenchmarkInstance::label_model() const {
    if (label_is_lp) return read_lp(label_text);
    return parse_model_grammar(label_text);
}

std::vector<BenchmarkInstance> load_benchmark(const std::string& directory) {
    nlohmann::json manifest = load_manifest(directory);
    std::vector<BenchmarkInstance> instances;
    std::set<std::string> ids;
    for (const auto& item : manifest.at("instances")) {
        BenchmarkInstance inst;
        inst.id = item.at("id").get<std::string>();
        if (!ids.insert(inst.id).second) throw RefError("duplicate instance id '" + inst.id + "'");
        auto type = parse_type(item.at("type").get<std::string>());
        if (!type) throw RefError("instance '" + inst.id + "': unknown type");
        inst.declared_type = *type;
        inst.label_optimal = item.at("optimal").get<double>();
        fs::path dir = fs::path(directory) / item.at("dir").get<std::string>();
        inst.query = read_file(dir / "query.txt", inst.id);
        inst.approx_tokens = approx_tokens(inst.query);
        if (fs::exists(dir / "label.txt")) {
            inst.label_text = read_file(dir / "label.txt", inst.id);
        } else if (fs::exists(dir / "label.lp")) {
            inst.label_text = read_file(dir / "label.lp", inst.id);
            inst.label_is_lp = true;
        } else {
            throw RefError("instance '" + inst.id + "': no label.txt or label.lp");
        }
        for (const auto& name : item.value("datasets", std::vector<std::string>{})) {
            fs::path p = dir / name;
            if (!fs::exists(p))
                throw RefError("instance '" + inst.id + "': dangling dataset path " + p.string());
            inst.dataset_paths.push_back(p.string());
        }
        instances.push_back(std::move(inst));
    }
    return instances;
}

ValidationReport validate_instance(const BenchmarkInstance& instance) {
    ValidationReport report;
    LinearModel model = instance.label_model();
    Solution sol = solve_milp(model);
    if (sol.status != SolveStatus::Optimal) {
        report.message = "label model did not solve to optimality";
        return report;
    }
    report.solved_value = sol.objective;
    double tol = std::max(1e-6, 1e-4 * std::fabs(instance.label_optimal));
    report.value_ok = std::fabs(sol.objective - instance.label_optimal) <= tol;
    if (!report.value_ok)
        report.message = "solved value disagrees with the stored optimal";

    // Multiple-optima probe: tiny random objective tilts should keep the
    // optimal value but may move the arg max if the optimum is not unique.
    double scale = 0.0;
    for (const auto& t : model.objective.terms) scale = std::max(scale, std::fabs(t.coeff));
    if (scale == 0.0) scale = 1.0;
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> tilt(-1.0, 1.0);
    std::vector<double> direction(model.objective.terms.size());
    for (int trial = 0; trial < 6 && !report.uniqueness_suspect; ++trial) {
        if (trial % 2 == 0)
            for (auto& d : direction) d = tilt(rng);
        else
            for (auto& d : direction) d = -d;  // probe the opposite tilt too
        LinearModel perturbed = model;
        for (size_t k = 0; k < perturbed.objective.terms.size(); ++k)
            perturbed.objective.terms[k].coeff += 1e-7 * scale * direction[k];
        Solution alt = solve_milp(perturbed);
        if (alt.status != SolveStatus::Optimal) continue;
        // evaluate the alternate point under the original objective
        double value = model.objective.constant;
        for (const auto& t : model.objective.terms) value += t.coeff * alt.values.at(t.var);
        if (std::fabs(value - sol.objective) > tol) continue;  // not optimal originally
        for (const auto& [name, x] : sol.values) {
            if (std::fabs(alt.values.at(name) - x) > 1e-6) {
                report.uniqueness_suspect = true;
                report.message = "two distinct optimal solutions found";
                break;
            }
        }
    }
    return report;
}

}  // namespace leanopt
