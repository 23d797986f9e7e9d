#include "leanopt/sblp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace leanopt {

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        if (std::isalnum((unsigned char)c))
            out += c;
        else if (!out.empty() && out.back() != '_')
            out += '_';
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = (char)std::tolower((unsigned char)c);
    return s;
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(trim(text), &pos);
        if (pos != trim(text).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw SblpError("cannot parse number '" + text + "' in " + what);
    }
}

int find_col(const CsvTable& table, const std::vector<std::string>& alternatives) {
    for (const auto& alt : alternatives)
        for (size_t j = 0; j < table.header.size(); ++j)
            if (lower(trim(table.header[j])) == lower(alt)) return (int)j;
    throw SblpError("table '" + table.name + "' has no column '" + alternatives.front() + "'");
}

// "(A,B)", "('A','B')", "A-B" and "A,B" all mean origin A, destination B.
std::pair<std::string, std::string> parse_od(const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != '(' && c != ')' && c != '\'' && c != '"' && c != ' ') s += c;
    size_t sep = s.find_first_of(",-");
    if (sep == std::string::npos || sep == 0 || sep + 1 >= s.size())
        throw SblpError("cannot parse origin-destination pair '" + text + "'");
    return {s.substr(0, sep), s.substr(sep + 1)};
}

// Clock labels as they appear in fare-window headers and departure columns:
// "8am", "12pm", "6pm", "11:20", or a bare hour like "12" (noon in "12-6pm").
double parse_clock(const std::string& text) {
    std::string s = lower(trim(text));
    double shift = 0.0;
    if (s.size() >= 2 && (s.substr(s.size() - 2) == "am" || s.substr(s.size() - 2) == "pm")) {
        bool pm = s[s.size() - 2] == 'p';
        s = trim(s.substr(0, s.size() - 2));
        double h = parse_number(s.substr(0, s.find(':')), "clock label '" + text + "'");
        if (h == 12) shift = pm ? 0 : -12;  // 12am = 0h, 12pm = 12h
        else if (pm) shift = 12;
    }
    size_t colon = s.find(':');
    double hours = parse_number(colon == std::string::npos ? s : s.substr(0, colon),
                                "clock label '" + text + "'");
    double minutes = colon == std::string::npos
                         ? 0.0
                         : parse_number(s.substr(colon + 1), "clock label '" + text + "'");
    double t = hours + shift + minutes / 60.0;
    if (t < 0 || t >= 24 || minutes < 0 || minutes >= 60)
        throw SblpError("clock label '" + text + "' is out of range");
    return t;
}

// A v1/v2 column header like "Eco-lite (8am-12pm)".
struct FareWindow {
    std::string fare;
    double start = 0.0, end = 24.0;
    int column = -1;

    bool covers(double t) const {
        if (start == end) return true;
        if (start < end) return t >= start && t < end;
        return t >= start || t < end;  // overnight window
    }
};

std::vector<FareWindow> fare_windows(const CsvTable& table) {
    std::vector<FareWindow> out;
    for (size_t j = 1; j < table.header.size(); ++j) {
        std::string h = trim(table.header[j]);
        if (lower(h) == "no purchase") continue;
        size_t open = h.rfind('(');
        size_t close = h.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw SblpError("table '" + table.name + "': header '" + h +
                            "' is not of the form \"Fare (start-end)\"");
        std::string range = h.substr(open + 1, close - open - 1);
        size_t dash = range.find('-');
        if (dash == std::string::npos)
            throw SblpError("table '" + table.name + "': window '" + range + "' has no dash");
        FareWindow w;
        w.fare = trim(h.substr(0, open));
        w.start = parse_clock(range.substr(0, dash));
        w.end = parse_clock(range.substr(dash + 1));
        w.column = (int)j;
        out.push_back(std::move(w));
    }
    return out;
}

double window_value(const CsvTable& table, const std::vector<FareWindow>& windows,
                    const std::vector<std::string>& row, const std::string& fare,
                    double departure) {
    for (const auto& w : windows)
        if (lower(w.fare) == lower(fare) && w.covers(departure))
            return parse_number(row[(size_t)w.column], "table '" + table.name + "'");
    throw SblpError("table '" + table.name + "' has no '" + fare +
                    "' column covering departure hour " + std::to_string(departure));
}

void check_option(const ProductOption& opt) {
    if (opt.v <= 0) throw SblpError("option " + opt.flight_key() + " " + opt.fare +
                                    ": attraction value must be positive");
    if (opt.w < 0 || opt.w > opt.v)
        throw SblpError("option " + opt.flight_key() + " " + opt.fare +
                        ": shadow attraction must lie in [0, v]");
    if (opt.A <= 0) throw SblpError("option " + opt.flight_key() + " " + opt.fare +
                                    ": capacity consumption must be positive");
    if (opt.price < 0) throw SblpError("option " + opt.flight_key() + " " + opt.fare +
                                       ": negative price");
}

std::string x_name(const ProductOption& opt) {
    return "x_" + sanitize(opt.segment) + "_" + sanitize(opt.departure) + "_" +
           sanitize(opt.fare);
}

}  // namespace

const Segment* GamInstance::find_segment(const std::string& id) const {
    for (const auto& s : segments)
        if (s.id() == id) return &s;
    return nullptr;
}

std::vector<size_t> GamInstance::segment_options(const std::string& id) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < options.size(); ++i)
        if (options[i].segment == id) out.push_back(i);
    return out;
}

std::vector<std::string> GamInstance::airports() const {
    std::set<std::string> set;
    for (const auto& s : segments) {
        set.insert(s.origin);
        set.insert(s.destination);
    }
    return {set.begin(), set.end()};
}

GamProbabilities gam_probabilities(const Segment& segment,
                                   const std::vector<ProductOption>& all,
                                   const std::vector<size_t>& offered) {
    if (segment.v0 <= 0) throw SblpError("segment " + segment.id() + ": v0 must be positive");
    double v0_tilde = segment.v0;  // v0 plus every shadow value in the universe
    for (const auto& opt : all) {
        check_option(opt);
        v0_tilde += opt.w;
    }
    double denom = v0_tilde;
    for (size_t i : offered) {
        if (i >= all.size()) throw SblpError("offered index out of range");
        denom += all[i].v - all[i].w;
    }
    GamProbabilities out;
    out.pi.reserve(offered.size());
    for (size_t i : offered) out.pi.push_back(all[i].v / denom);
    // independent closed form: unclaimed attraction over the same denominator
    double unclaimed = segment.v0;
    std::set<size_t> in_s(offered.begin(), offered.end());
    for (size_t i = 0; i < all.size(); ++i)
        if (!in_s.count(i)) unclaimed += all[i].w;
    out.pi0 = unclaimed / denom;
    return out;
}

LinearModel build_sblp(const GamInstance& instance, const std::vector<size_t>& selected) {
    LinearModel model;
    model.sense = Objective::Maximize;

    std::set<size_t> chosen;
    for (size_t i : selected) {
        if (i >= instance.options.size()) throw SblpError("selected index out of range");
        if (!chosen.insert(i).second) throw SblpError("option selected twice");
        check_option(instance.options[i]);
    }

    // sales variable per selected option, in instance order
    std::vector<size_t> order(chosen.begin(), chosen.end());
    for (size_t i : order) {
        const auto& opt = instance.options[i];
        model.variables.push_back({x_name(opt)});
        model.objective.add(opt.price, x_name(opt));
    }

    // one capacity row per flight that sells a selected option
    std::vector<std::string> flights;
    for (size_t i : order) {
        const std::string& key = instance.options[i].flight_key();
        if (std::find(flights.begin(), flights.end(), key) == flights.end())
            flights.push_back(key);
    }
    for (const auto& key : flights) {
        auto it = instance.capacity.find(key);
        if (it == instance.capacity.end())
            throw SblpError("no seat capacity recorded for flight " + key);
        Constraint row;
        row.name = "cap_" + sanitize(key);
        for (size_t i : order)
            if (instance.options[i].flight_key() == key)
                row.expr.add(instance.options[i].A, x_name(instance.options[i]));
        row.sense = Sense::Le;
        row.rhs = it->second;
        model.constraints.push_back(std::move(row));
    }

    // demand balance per segment that owns a selected option; the no-purchase
    // coefficient sums shadow values over the segment's full option universe
    std::vector<std::string> segs;
    for (size_t i : order)
        if (std::find(segs.begin(), segs.end(), instance.options[i].segment) == segs.end())
            segs.push_back(instance.options[i].segment);
    for (const auto& seg_id : segs) {
        const Segment* seg = instance.find_segment(seg_id);
        if (!seg) throw SblpError("option references unknown segment " + seg_id);
        if (seg->v0 <= 0) throw SblpError("segment " + seg_id + ": v0 must be positive");
        if (seg->lambda < 0) throw SblpError("segment " + seg_id + ": negative demand");
        std::string x0 = "x0_" + sanitize(seg_id);
        model.variables.push_back({x0});
        double v0_tilde = seg->v0;
        for (size_t i : instance.segment_options(seg_id)) v0_tilde += instance.options[i].w;
        Constraint row;
        row.name = "bal_" + sanitize(seg_id);
        row.expr.add(v0_tilde / seg->v0, x0);
        for (size_t i : order)
            if (instance.options[i].segment == seg_id)
                row.expr.add((instance.options[i].v - instance.options[i].w) /
                                 instance.options[i].v,
                             x_name(instance.options[i]));
        row.sense = Sense::Eq;
        row.rhs = seg->lambda;
        model.constraints.push_back(std::move(row));
    }

    // scale rows: each option's sales rate cannot exceed the no-purchase rate
    for (size_t i : order) {
        const auto& opt = instance.options[i];
        Constraint row;
        row.name = "scale_" + sanitize(opt.segment) + "_" + sanitize(opt.departure) + "_" +
                   sanitize(opt.fare);
        row.expr.add(1.0 / opt.v, x_name(opt));
        row.expr.add(-1.0 / instance.find_segment(opt.segment)->v0, "x0_" + sanitize(opt.segment));
        row.sense = Sense::Le;
        row.rhs = 0.0;
        model.constraints.push_back(std::move(row));
    }

    require_valid(model);
    return model;
}

double choose_big_m(const Segment& segment, const std::vector<ProductOption>& options) {
    if (options.empty()) throw SblpError("segment " + segment.id() + ": no options to bound");
    double v_max = 0.0, vt_min = kInf;
    for (const auto& opt : options) {
        check_option(opt);
        v_max = std::max(v_max, opt.v);
        vt_min = std::min(vt_min, opt.v - opt.w);
    }
    if (vt_min <= 0)
        throw SblpError("segment " + segment.id() +
                        ": an option has w = v, supply a big-M bound explicitly");
    return segment.lambda * std::max(1.0, v_max / vt_min);
}

LinearModel build_network_planning(const GamInstance& instance,
                                   const std::vector<std::string>& candidate_flights, long Z,
                                   const std::map<std::string, double>& big_m) {
    if (Z < 0) throw SblpError("negative flight budget");
    std::set<std::string> candidates;
    for (const auto& key : candidate_flights)
        if (!candidates.insert(key).second)
            throw SblpError("candidate flight " + key + " listed twice");

    std::vector<size_t> selected;
    for (size_t i = 0; i < instance.options.size(); ++i)
        if (candidates.count(instance.options[i].flight_key())) selected.push_back(i);
    for (const auto& key : candidates) {
        bool found = false;
        for (size_t i : selected) found |= instance.options[i].flight_key() == key;
        if (!found) throw SblpError("candidate flight " + key + " sells no options");
    }

    LinearModel model = build_sblp(instance, selected);

    // operate/skip decision per candidate flight, in the caller's order
    std::vector<std::string> keys;
    for (const auto& key : candidate_flights) keys.push_back(key);
    for (const auto& key : keys) model.variables.push_back({"y_" + sanitize(key), 0, 1,
                                                            VarKind::Binary});

    // sales only on operated flights
    for (size_t i : selected) {
        const auto& opt = instance.options[i];
        double m;
        auto it = big_m.find(opt.flight_key());
        if (it != big_m.end()) {
            m = it->second;
            if (m <= 0) throw SblpError("big-M for flight " + opt.flight_key() +
                                        " must be positive");
        } else {
            const Segment* seg = instance.find_segment(opt.segment);
            std::vector<ProductOption> seg_opts;
            for (size_t j : instance.segment_options(opt.segment))
                seg_opts.push_back(instance.options[j]);
            m = choose_big_m(*seg, seg_opts);
        }
        Constraint row;
        row.name = "link_" + sanitize(opt.segment) + "_" + sanitize(opt.departure) + "_" +
                   sanitize(opt.fare);
        row.expr.add(1.0, x_name(opt));
        row.expr.add(-m, "y_" + sanitize(opt.flight_key()));
        row.sense = Sense::Le;
        row.rhs = 0.0;
        model.constraints.push_back(std::move(row));
    }

    Constraint budget;
    budget.name = "flight_budget";
    for (const auto& key : keys) budget.expr.add(1.0, "y_" + sanitize(key));
    budget.sense = Sense::Le;
    budget.rhs = (double)Z;
    model.constraints.push_back(std::move(budget));

    // aircraft rotation: per airport, operated arrivals match operated departures
    for (const auto& airport : instance.airports()) {
        Constraint row;
        row.name = "flow_" + sanitize(airport);
        for (const auto& key : keys) {
            size_t at = key.find('@');
            const Segment* seg = instance.find_segment(key.substr(0, at));
            if (seg->destination == airport) row.expr.add(1.0, "y_" + sanitize(key));
            if (seg->origin == airport) row.expr.add(-1.0, "y_" + sanitize(key));
        }
        if (row.expr.terms.empty()) continue;  // airport untouched by the candidates
        row.sense = Sense::Eq;
        row.rhs = 0.0;
        model.constraints.push_back(std::move(row));
    }

    require_valid(model);
    return model;
}

GamInstance load_gam_instance(const CsvTable& flights, const CsvTable& od_demand,
                              const CsvTable& v1, const CsvTable& v2, ShadowMode mode) {
    GamInstance inst;

    int od_col = find_col(od_demand, {"OD", "OD Pair", "Origin-Destination"});
    int pax_col = find_col(od_demand, {"Avg Pax", "Average Pax", "Demand"});
    for (const auto& row : od_demand.rows) {
        auto [origin, destination] = parse_od(row[(size_t)od_col]);
        Segment seg;
        seg.origin = origin;
        seg.destination = destination;
        seg.lambda = parse_number(row[(size_t)pax_col], "table '" + od_demand.name + "'");
        if (inst.find_segment(seg.id()))
            throw SblpError("duplicate demand row for " + seg.id());
        inst.segments.push_back(std::move(seg));
    }

    auto v1_windows = fare_windows(v1);
    auto v2_windows = fare_windows(v2);
    auto find_row = [](const CsvTable& t, const std::string& seg_id) -> const std::vector<std::string>* {
        for (const auto& row : t.rows)
            if (parse_od(row[0]).first + "-" + parse_od(row[0]).second == seg_id) return &row;
        return nullptr;
    };

    int np_col = -1;
    for (size_t j = 0; j < v1.header.size(); ++j)
        if (lower(trim(v1.header[j])) == "no purchase") np_col = (int)j;
    for (auto& seg : inst.segments) {
        const auto* row = find_row(v1, seg.id());
        if (row && np_col >= 0)
            seg.v0 = parse_number((*row)[(size_t)np_col], "table '" + v1.name + "'");
    }

    int f_od = find_col(flights, {"OD", "OD Pair", "Origin-Destination"});
    int f_dep = find_col(flights, {"Departure", "Departure Time"});
    int f_fare = find_col(flights, {"Fare type", "Fare", "Fare Type"});
    int f_price = find_col(flights, {"Avg Price", "Average Price", "Price"});
    int f_cap = find_col(flights, {"Capacity", "Seats"});
    int f_coef = find_col(flights, {"Capacity Coefficient", "Flex Cpy Coef", "Consumption"});
    for (const auto& row : flights.rows) {
        auto [origin, destination] = parse_od(row[(size_t)f_od]);
        ProductOption opt;
        opt.segment = origin + "-" + destination;
        const Segment* seg = inst.find_segment(opt.segment);
        if (!seg) throw SblpError("flight row references " + opt.segment +
                                  " which has no demand row");
        opt.departure = trim(row[(size_t)f_dep]);
        opt.fare = trim(row[(size_t)f_fare]);
        opt.price = parse_number(row[(size_t)f_price], "table '" + flights.name + "'");
        opt.A = parse_number(row[(size_t)f_coef], "table '" + flights.name + "'");
        double departure = parse_clock(opt.departure);

        const auto* v1_row = find_row(v1, opt.segment);
        if (!v1_row) throw SblpError("table '" + v1.name + "' has no row for " + opt.segment);
        opt.v = window_value(v1, v1_windows, *v1_row, opt.fare, departure);
        const auto* v2_row = find_row(v2, opt.segment);
        if (!v2_row) throw SblpError("table '" + v2.name + "' has no row for " + opt.segment);
        double shadow = window_value(v2, v2_windows, *v2_row, opt.fare, departure);
        opt.w = mode == ShadowMode::Ratio ? shadow * opt.v : shadow;
        check_option(opt);

        double cap = parse_number(row[(size_t)f_cap], "table '" + flights.name + "'");
        auto [it, inserted] = inst.capacity.emplace(opt.flight_key(), cap);
        if (!inserted && it->second != cap)
            throw SblpError("flight " + opt.flight_key() + " has conflicting capacities");
        inst.options.push_back(std::move(opt));
    }
    return inst;
}

}  // namespace leanopt
