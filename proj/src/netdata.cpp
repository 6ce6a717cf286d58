#include "qcopf/netdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace qcopf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

struct Table {
    std::vector<std::vector<double>> rows;
    std::vector<int> line_numbers;
};

struct RawCase {
    double base_mva = -1.0;
    Table bus, gen, branch, gencost;
    bool has_bus = false, has_gen = false, has_branch = false, has_gencost = false;
};

std::string strip_comment(const std::string& line) {
    const auto pos = line.find('%');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_row(const std::string& text, int line_no, std::vector<double>& out) {
    out.clear();
    const char* p = text.c_str();
    while (*p) {
        while (*p == ' ' || *p == '\t' || *p == ',' || *p == ';' || *p == '\r') ++p;
        if (!*p) break;
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) throw ParseError(line_no, "expected a number, got '" + std::string(p) + "'");
        out.push_back(v);
        p = end;
    }
    return !out.empty();
}

RawCase read_tables(std::istream& in) {
    RawCase raw;
    std::string line;
    int line_no = 0;
    Table* active = nullptr;

    while (std::getline(in, line)) {
        ++line_no;
        std::string body = strip_comment(line);

        if (active) {
            const auto close = body.find(']');
            bool closing = close != std::string::npos;
            if (closing) body = body.substr(0, close);
            std::vector<double> row;
            if (parse_row(body, line_no, row)) {
                active->rows.push_back(std::move(row));
                active->line_numbers.push_back(line_no);
            }
            if (closing) active = nullptr;
            continue;
        }

        const auto eq = body.find('=');
        if (eq == std::string::npos) continue;
        std::string key = body.substr(0, eq);
        key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
        std::string rest = body.substr(eq + 1);

        if (key == "mpc.baseMVA") {
            char* end = nullptr;
            raw.base_mva = std::strtod(rest.c_str(), &end);
            if (end == rest.c_str()) throw ParseError(line_no, "bad baseMVA value");
            continue;
        }
        Table* target = nullptr;
        if (key == "mpc.bus") { target = &raw.bus; raw.has_bus = true; }
        else if (key == "mpc.gen") { target = &raw.gen; raw.has_gen = true; }
        else if (key == "mpc.branch") { target = &raw.branch; raw.has_branch = true; }
        else if (key == "mpc.gencost") { target = &raw.gencost; raw.has_gencost = true; }
        if (!target) continue;

        const auto open = rest.find('[');
        if (open == std::string::npos) throw ParseError(line_no, "expected '[' after " + key);
        rest = rest.substr(open + 1);
        const auto close = rest.find(']');
        const bool closes_inline = close != std::string::npos;
        if (closes_inline) rest = rest.substr(0, close);
        std::vector<double> row;
        // a multi-row table may start rows on the assignment line; split on ';'
        std::stringstream ss(rest);
        std::string part;
        while (std::getline(ss, part, ';')) {
            if (parse_row(part, line_no, row)) {
                target->rows.push_back(row);
                target->line_numbers.push_back(line_no);
            }
        }
        if (!closes_inline) active = target;
    }
    return raw;
}

double col(const std::vector<double>& row, std::size_t idx0, int line_no, const char* table) {
    if (idx0 >= row.size())
        throw ParseError(line_no, std::string(table) + " row has only " +
                                      std::to_string(row.size()) + " columns");
    return row[idx0];
}

} // namespace

int Network::bus_index(int id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return static_cast<int>(i);
    throw std::out_of_range("unknown bus id " + std::to_string(id));
}

int Network::reference_index() const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].is_reference) return static_cast<int>(i);
    throw std::out_of_range("network has no reference bus");
}

Network parse_case(std::istream& in) {
    RawCase raw = read_tables(in);
    if (raw.base_mva <= 0.0) throw ParseError(0, "missing or non-positive mpc.baseMVA");
    if (!raw.has_bus || !raw.has_branch) throw ParseError(0, "missing mpc.bus or mpc.branch table");

    Network net;
    net.base_mva = raw.base_mva;
    const double base = raw.base_mva;

    int ref_count = 0;
    std::unordered_map<int, int> seen_ids;
    for (std::size_t i = 0; i < raw.bus.rows.size(); ++i) {
        const auto& r = raw.bus.rows[i];
        const int ln = raw.bus.line_numbers[i];
        Bus bus;
        bus.id = static_cast<int>(col(r, 0, ln, "bus"));
        const int type = static_cast<int>(col(r, 1, ln, "bus"));
        bus.p_load = col(r, 2, ln, "bus") / base;
        bus.q_load = col(r, 3, ln, "bus") / base;
        bus.g_shunt = col(r, 4, ln, "bus") / base;
        bus.b_shunt = col(r, 5, ln, "bus") / base;
        bus.v_max = col(r, 11, ln, "bus");
        bus.v_min = col(r, 12, ln, "bus");
        bus.is_reference = (type == 3);
        if (bus.is_reference) ++ref_count;
        if (!seen_ids.emplace(bus.id, static_cast<int>(net.buses.size())).second)
            throw ParseError(ln, "duplicate bus id " + std::to_string(bus.id));
        net.buses.push_back(bus);
    }
    if (ref_count != 1)
        throw ParseError(0, "expected exactly one reference bus, found " +
                                std::to_string(ref_count));

    const std::size_t n_gen_rows = raw.gen.rows.size();
    if (raw.has_gencost && raw.gencost.rows.size() != n_gen_rows)
        throw ParseError(0, "gencost table must have one row per generator");
    for (std::size_t i = 0; i < n_gen_rows; ++i) {
        const auto& r = raw.gen.rows[i];
        const int ln = raw.gen.line_numbers[i];
        const int status = static_cast<int>(col(r, 7, ln, "gen"));
        if (status <= 0) continue;
        Generator g;
        g.bus = static_cast<int>(col(r, 0, ln, "gen"));
        if (!seen_ids.count(g.bus))
            throw ParseError(ln, "generator references unknown bus " + std::to_string(g.bus));
        g.q_max = col(r, 3, ln, "gen") / base;
        g.q_min = col(r, 4, ln, "gen") / base;
        g.p_max = col(r, 8, ln, "gen") / base;
        g.p_min = col(r, 9, ln, "gen") / base;
        if (raw.has_gencost) {
            const auto& cr = raw.gencost.rows[i];
            const int cln = raw.gencost.line_numbers[i];
            const int model = static_cast<int>(col(cr, 0, cln, "gencost"));
            if (model != 2)
                throw UnsupportedFeatureError("piecewise-linear generator costs are not supported");
            const int ncost = static_cast<int>(col(cr, 3, cln, "gencost"));
            if (ncost > 3)
                throw UnsupportedFeatureError("polynomial costs beyond degree 2 are not supported");
            // highest order first; rescale so power is in p.u.
            std::vector<double> cc(static_cast<std::size_t>(ncost));
            for (int k = 0; k < ncost; ++k) cc[static_cast<std::size_t>(k)] = col(cr, 4 + k, cln, "gencost");
            if (ncost == 3) {
                g.cost_c2 = cc[0] * base * base;
                g.cost_c1 = cc[1] * base;
                g.cost_c0 = cc[2];
            } else if (ncost == 2) {
                g.cost_c1 = cc[0] * base;
                g.cost_c0 = cc[1];
            } else if (ncost == 1) {
                g.cost_c0 = cc[0];
            }
        }
        net.generators.push_back(g);
    }

    int next_branch_id = 1;
    for (std::size_t i = 0; i < raw.branch.rows.size(); ++i) {
        const auto& r = raw.branch.rows[i];
        const int ln = raw.branch.line_numbers[i];
        const int status = static_cast<int>(col(r, 10, ln, "branch"));
        if (status == 0) continue;
        Branch br;
        br.id = next_branch_id++;
        br.from_bus = static_cast<int>(col(r, 0, ln, "branch"));
        br.to_bus = static_cast<int>(col(r, 1, ln, "branch"));
        if (!seen_ids.count(br.from_bus) || !seen_ids.count(br.to_bus))
            throw ParseError(ln, "branch references unknown bus");
        const double res = col(r, 2, ln, "branch");
        const double reac = col(r, 3, ln, "branch");
        const double z2 = res * res + reac * reac;
        if (z2 == 0.0) throw ParseError(ln, "zero-impedance branch is not supported");
        br.g = res / z2;
        br.b = -reac / z2;
        br.b_charge = col(r, 4, ln, "branch");
        const double rate_a = col(r, 5, ln, "branch");
        br.unlimited = rate_a == 0.0;
        br.s_max = br.unlimited ? 0.0 : rate_a / base;
        const double tap = col(r, 8, ln, "branch");
        br.tap = tap == 0.0 ? 1.0 : tap;
        const double shift = col(r, 9, ln, "branch");
        if (shift != 0.0)
            throw UnsupportedFeatureError("non-zero branch phase-shift angles are not supported");
        if (r.size() >= 13) {
            const double amin = col(r, 11, ln, "branch");
            const double amax = col(r, 12, ln, "branch");
            if (amin == 0.0 && amax == 0.0) {
                br.theta_min = -kPi; // unconstrained convention; clamped at validation
                br.theta_max = kPi;
            } else {
                br.theta_min = amin * kDegToRad;
                br.theta_max = amax * kDegToRad;
            }
        } else {
            br.theta_min = -kPi;
            br.theta_max = kPi;
        }
        net.branches.push_back(br);
    }
    return net;
}

Network parse_case(const std::string& text) {
    std::istringstream ss(text);
    return parse_case(ss);
}

Network parse_case_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open case file: " + path);
    return parse_case(f);
}

bool ValidationResult::ok() const { return error_count() == 0; }

std::size_t ValidationResult::error_count() const {
    std::size_t n = 0;
    for (const auto& d : diagnostics)
        if (d.level == Diagnostic::Level::error) ++n;
    return n;
}

namespace {

bool all_finite(std::initializer_list<double> vals) {
    for (double v : vals)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace

ValidationResult validate(const Network& net, const ValidateOptions& opts) {
    ValidationResult result;
    result.network = net;
    auto& out = result.diagnostics;
    const auto err = [&](std::string m) {
        out.push_back({Diagnostic::Level::error, std::move(m)});
    };
    const auto warn = [&](std::string m) {
        out.push_back({Diagnostic::Level::warning, std::move(m)});
    };

    int refs = 0;
    for (const auto& bus : net.buses) {
        if (bus.is_reference) ++refs;
        if (!(bus.v_min > 0.0))
            err("bus " + std::to_string(bus.id) + ": v_min must be positive");
        if (bus.v_min > bus.v_max)
            err("bus " + std::to_string(bus.id) + ": v_min > v_max");
        if (!all_finite({bus.p_load, bus.q_load, bus.g_shunt, bus.b_shunt, bus.v_min, bus.v_max}))
            err("bus " + std::to_string(bus.id) + ": non-finite field");
    }
    if (refs != 1) err("expected exactly one reference bus, found " + std::to_string(refs));

    for (const auto& g : net.generators) {
        const std::string tag = "generator at bus " + std::to_string(g.bus);
        bool known = true;
        try {
            net.bus_index(g.bus);
        } catch (const std::out_of_range&) {
            err(tag + ": unknown bus");
            known = false;
        }
        (void)known;
        if (g.cost_c2 < 0.0) err(tag + ": negative quadratic cost coefficient");
        if (g.p_min > g.p_max) err(tag + ": p_min > p_max");
        if (g.q_min > g.q_max) err(tag + ": q_min > q_max");
        if (!all_finite({g.p_min, g.p_max, g.q_min, g.q_max, g.cost_c2, g.cost_c1, g.cost_c0}))
            err(tag + ": non-finite field");
    }

    const double d = opts.default_angle_bound;
    for (auto& br : result.network.branches) {
        const std::string tag = "branch " + std::to_string(br.id);
        if (br.from_bus == br.to_bus) err(tag + ": from_bus equals to_bus");
        try {
            net.bus_index(br.from_bus);
            net.bus_index(br.to_bus);
        } catch (const std::out_of_range&) {
            err(tag + ": unknown bus reference");
        }
        if (!br.unlimited && !(br.s_max > 0.0)) err(tag + ": non-positive apparent power limit");
        if (!all_finite({br.g, br.b, br.b_charge, br.tap, br.s_max}))
            err(tag + ": non-finite field");
        if (!std::isfinite(br.theta_min) || !std::isfinite(br.theta_max) ||
            br.theta_min <= -0.5 * kPi || br.theta_max >= 0.5 * kPi) {
            const double lo = (std::isfinite(br.theta_min) && br.theta_min > -0.5 * kPi)
                                  ? br.theta_min
                                  : -d;
            const double hi =
                (std::isfinite(br.theta_max) && br.theta_max < 0.5 * kPi) ? br.theta_max : d;
            warn(tag + ": angle-difference bounds clamped to [" + std::to_string(lo) + ", " +
                 std::to_string(hi) + "] rad");
            br.theta_min = lo;
            br.theta_max = hi;
        }
        if (br.theta_min > br.theta_max) err(tag + ": theta_min > theta_max");
    }
    return result;
}

nlohmann::json to_json(const Network& net) {
    nlohmann::json j;
    j["base_mva"] = net.base_mva;
    auto& buses = j["buses"] = nlohmann::json::array();
    for (const auto& b : net.buses)
        buses.push_back({{"id", b.id},
                         {"p_load", b.p_load},
                         {"q_load", b.q_load},
                         {"g_shunt", b.g_shunt},
                         {"b_shunt", b.b_shunt},
                         {"v_min", b.v_min},
                         {"v_max", b.v_max},
                         {"is_reference", b.is_reference}});
    auto& gens = j["generators"] = nlohmann::json::array();
    for (const auto& g : net.generators)
        gens.push_back({{"bus", g.bus},
                        {"p_min", g.p_min},
                        {"p_max", g.p_max},
                        {"q_min", g.q_min},
                        {"q_max", g.q_max},
                        {"cost_c2", g.cost_c2},
                        {"cost_c1", g.cost_c1},
                        {"cost_c0", g.cost_c0}});
    auto& branches = j["branches"] = nlohmann::json::array();
    for (const auto& br : net.branches)
        branches.push_back({{"id", br.id},
                            {"from_bus", br.from_bus},
                            {"to_bus", br.to_bus},
                            {"g", br.g},
                            {"b", br.b},
                            {"b_charge", br.b_charge},
                            {"tap", br.tap},
                            {"s_max", br.s_max},
                            {"unlimited", br.unlimited},
                            {"theta_min", br.theta_min},
                            {"theta_max", br.theta_max}});
    return j;
}

Network network_from_json(const nlohmann::json& j) {
    Network net;
    net.base_mva = j.at("base_mva").get<double>();
    for (const auto& jb : j.at("buses")) {
        Bus b;
        b.id = jb.at("id").get<int>();
        b.p_load = jb.at("p_load").get<double>();
        b.q_load = jb.at("q_load").get<double>();
        b.g_shunt = jb.at("g_shunt").get<double>();
        b.b_shunt = jb.at("b_shunt").get<double>();
        b.v_min = jb.at("v_min").get<double>();
        b.v_max = jb.at("v_max").get<double>();
        b.is_reference = jb.at("is_reference").get<bool>();
        net.buses.push_back(b);
    }
    for (const auto& jg : j.at("generators")) {
        Generator g;
        g.bus = jg.at("bus").get<int>();
        g.p_min = jg.at("p_min").get<double>();
        g.p_max = jg.at("p_max").get<double>();
        g.q_min = jg.at("q_min").get<double>();
        g.q_max = jg.at("q_max").get<double>();
        g.cost_c2 = jg.at("cost_c2").get<double>();
        g.cost_c1 = jg.at("cost_c1").get<double>();
        g.cost_c0 = jg.at("cost_c0").get<double>();
        net.generators.push_back(g);
    }
    for (const auto& jb : j.at("branches")) {
        Branch br;
        br.id = jb.at("id").get<int>();
        br.from_bus = jb.at("from_bus").get<int>();
        br.to_bus = jb.at("to_bus").get<int>();
        br.g = jb.at("g").get<double>();
        br.b = jb.at("b").get<double>();
        br.b_charge = jb.at("b_charge").get<double>();
        br.tap = jb.at("tap").get<double>();
        br.s_max = jb.at("s_max").get<double>();
        br.unlimited = jb.at("unlimited").get<bool>();
        br.theta_min = jb.at("theta_min").get<double>();
        br.theta_max = jb.at("theta_max").get<double>();
        net.branches.push_back(br);
    }
    return net;
}

} // namespace qcopf
