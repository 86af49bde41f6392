#include "indemnify/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "indemnify/errors.hpp"

namespace indemnify {

namespace {

using nlohmann::json;

const json& require(const json& node, const char* key, const std::string& path) {
    auto it = node.find(key);
    if (it == node.end()) {
        throw ParseError("missing key '" + std::string(key) + "' at " + path);
    }
    return *it;
}

double require_number(const json& node, const char* key, const std::string& path) {
    const json& value = require(node, key, path);
    if (!value.is_number()) {
        throw ParseError("expected a number for '" + std::string(key) + "' at " + path);
    }
    return value.get<double>();
}

DensityKernel parse_kernel(const json& node, const std::string& path) {
    std::string type = require(node, "type", path).get<std::string>();
    if (type == "uniform") return UniformKernel{};
    if (type == "truncated_pareto") {
        return TruncatedParetoKernel{require_number(node, "scale", path),
                                     require_number(node, "shape", path)};
    }
    if (type == "truncated_exponential") {
        return TruncatedExponentialKernel{require_number(node, "rate", path)};
    }
    throw ParseError("unknown kernel type '" + type + "' at " + path);
}

UtilityModel parse_utility(const json& node, const std::string& path) {
    std::string kind = require(node, "kind", path).get<std::string>();
    json params = node.value("params", json::object());
    if (kind == "power") return UtilityModel::power(require_number(params, "gamma", path));
    if (kind == "log") return UtilityModel::logarithmic();
    if (kind == "exponential") {
        return UtilityModel::exponential(require_number(params, "alpha", path));
    }
    throw ParseError("unknown utility kind '" + kind + "' at " + path);
}

}  // namespace

MarketScenario parse_scenario(const json& doc) {
    const json& loss_node = require(doc, "loss", "$");

    std::vector<LossAtom> atoms;
    if (auto it = loss_node.find("atoms"); it != loss_node.end()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string path = "$.loss.atoms[" + std::to_string(i) + "]";
            atoms.push_back(
                {require_number((*it)[i], "x", path), require_number((*it)[i], "mass", path)});
        }
    }

    std::vector<LossPiece> pieces;
    if (auto it = loss_node.find("pieces"); it != loss_node.end()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string path = "$.loss.pieces[" + std::to_string(i) + "]";
            const json& p = (*it)[i];
            pieces.push_back({require_number(p, "lo", path), require_number(p, "hi", path),
                              parse_kernel(require(p, "kernel", path), path + ".kernel"),
                              require_number(p, "weight", path)});
        }
    }

    LossDistribution loss(std::move(atoms), std::move(pieces),
                          require_number(loss_node, "M", "$.loss"));

    const json& bg_node = require(doc, "background", "$");
    const json& points_node = require(bg_node, "points", "$.background");
    std::vector<BackgroundPoint> points;
    for (std::size_t i = 0; i < points_node.size(); ++i) {
        std::string path = "$.background.points[" + std::to_string(i) + "]";
        points.push_back({require_number(points_node[i], "s", path),
                          require_number(points_node[i], "p", path)});
    }
    BackgroundRisk background(std::move(points));

    UtilityModel utility = parse_utility(require(doc, "utility", "$"), "$.utility");
    double w = require_number(doc, "w", "$");
    double eta = require_number(doc, "eta", "$");
    double tau = require_number(doc, "tau", "$");

    return MarketScenario(std::move(loss), std::move(background), utility, w, eta, tau);
}

MarketScenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open scenario file " + file.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& err) {
        throw ParseError("scenario file " + file.string() + ": " + err.what());
    }
    return parse_scenario(doc);
}

namespace {

json kernel_to_json(const DensityKernel& kernel) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, UniformKernel>) {
                return {{"type", "uniform"}};
            } else if constexpr (std::is_same_v<K, TruncatedParetoKernel>) {
                return {{"type", "truncated_pareto"}, {"scale", k.scale}, {"shape", k.shape}};
            } else {
                return {{"type", "truncated_exponential"}, {"rate", k.rate}};
            }
        },
        kernel);
}

json utility_to_json(const UtilityModel& u) {
    switch (u.kind()) {
        case UtilityKind::power:
            return {{"kind", "power"}, {"params", {{"gamma", u.parameter()}}}};
        case UtilityKind::logarithmic:
            return {{"kind", "log"}, {"params", json::object()}};
        case UtilityKind::exponential:
        default:
            return {{"kind", "exponential"}, {"params", {{"alpha", u.parameter()}}}};
    }
}

}  // namespace

json scenario_to_json(const MarketScenario& scenario) {
    json atoms = json::array();
    for (const LossAtom& a : scenario.loss().atoms()) {
        atoms.push_back({{"x", a.point}, {"mass", a.mass}});
    }
    json pieces = json::array();
    for (const LossPiece& p : scenario.loss().pieces()) {
        pieces.push_back({{"lo", p.lo},
                          {"hi", p.hi},
                          {"kernel", kernel_to_json(p.kernel)},
                          {"weight", p.weight}});
    }
    json points = json::array();
    for (const BackgroundPoint& p : scenario.background().points()) {
        points.push_back({{"s", p.value}, {"p", p.probability}});
    }
    return {{"loss", {{"atoms", atoms}, {"pieces", pieces}, {"M", scenario.loss().max_loss()}}},
            {"background", {{"points", points}}},
            {"w", scenario.wealth()},
            {"eta", scenario.loading()},
            {"tau", scenario.recovery()},
            {"utility", utility_to_json(scenario.utility())}};
}

std::string to_string(JointCase c) {
    switch (c) {
        case JointCase::eta_zero:
            return "eta_zero";
        case JointCase::interior:
            return "interior";
        case JointCase::no_insurance:
        default:
            return "no_insurance";
    }
}

json contract_to_json(const Contract& contract) {
    if (const auto* dl = std::get_if<DeductibleLimitContract>(&contract)) {
        return {{"type", "deductible_limit"}, {"a", dl->premium}, {"d", dl->deductible}};
    }
    const auto& ml = std::get<MultiLayerContract>(contract);
    return {{"type", "multi_layer"},
            {"a", ml.premium},
            {"layers", ml.layers},
            {"states", ml.states}};
}

json report_to_json(const GlobalSolveReport& report) {
    return {{"problem", "joint"},
            {"case", to_string(report.case_taken)},
            {"a_star", report.a_star},
            {"d_star", report.d_star},
            {"a_bar", report.a_bar},
            {"eta_threshold", report.eta_threshold},
            {"contract", contract_to_json(Contract{report.contract})},
            {"objective", report.objective},
            {"residuals",
             {{"g_at_abar", report.residuals.g_at_abar},
              {"g_a_at_d", report.residuals.g_a_at_d},
              {"foc_at_astar", report.residuals.foc_at_astar}}},
            {"iterations",
             {{"a_bar", report.iterations.a_bar},
              {"deductible", report.iterations.deductible},
              {"a_star", report.iterations.a_star}}},
            {"threshold_tie", report.threshold_tie},
            {"assumption_warnings", report.assumption_warnings},
            {"warnings", report.warnings}};
}

json report_to_json(const LayeredSolveReport& report) {
    json defaults = json::array();
    for (const DefaultStateInfo& d : report.default_states) {
        json entry = {{"s", d.state}};
        if (d.threshold) {
            entry["threshold"] = *d.threshold;
        } else {
            entry["threshold"] = nullptr;
        }
        defaults.push_back(entry);
    }
    return {{"problem", "loss_only"},
            {"case", to_string(report.case_taken)},
            {"a_bar_N", report.a_bar_N},
            {"a_star", report.a_star},
            {"layers", report.layers_star},
            {"underline_l1", report.underline_l1},
            {"overline_l2", report.overline_l2},
            {"contract", contract_to_json(Contract{report.contract})},
            {"objective", report.objective},
            {"fixed_point_residual", report.fixed_point_residual},
            {"default_states", defaults},
            {"outer_scan_ties", report.outer_scan_ties},
            {"warnings", report.warnings}};
}

json sweep_to_json(const SweepTable& table) {
    static const char* axis_names[] = {"w", "gamma", "eta", "s_shift"};
    json rows = json::array();
    for (const SweepRow& row : table.rows) {
        if (row.ok) {
            rows.push_back({{"value", row.axis_value},
                            {"a_star", row.report.a_star},
                            {"d_star", row.report.d_star},
                            {"limit", row.report.a_star + row.report.d_star},
                            {"objective", row.report.objective},
                            {"case", to_string(row.report.case_taken)}});
        } else {
            rows.push_back({{"value", row.axis_value}, {"error", row.error}});
        }
    }
    json verdicts = json::array();
    for (const SweepVerdict& v : table.verdicts) {
        verdicts.push_back({{"property", v.property}, {"pass", v.pass}});
    }
    return {{"axis", axis_names[static_cast<int>(table.axis)]},
            {"rows", rows},
            {"verdicts", verdicts}};
}

namespace {

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

}  // namespace

std::string report_to_csv(const GlobalSolveReport& report) {
    std::ostringstream out;
    out << "problem,case,a_star,d_star,a_bar,eta_threshold,objective,g_at_abar,g_a_at_d,foc_at_"
           "astar\n";
    out << "joint," << to_string(report.case_taken) << ',' << format_double(report.a_star) << ','
        << format_double(report.d_star) << ',' << format_double(report.a_bar) << ','
        << format_double(report.eta_threshold) << ',' << format_double(report.objective) << ','
        << format_double(report.residuals.g_at_abar) << ','
        << format_double(report.residuals.g_a_at_d) << ','
        << format_double(report.residuals.foc_at_astar) << '\n';
    return out.str();
}

std::string report_to_csv(const LayeredSolveReport& report) {
    std::ostringstream out;
    out << "problem,case,a_star,a_bar_N,objective,fixed_point_residual";
    for (std::size_t i = 0; i < report.layers_star.size(); ++i) out << ",l" << (i + 1);
    out << '\n';
    out << "loss_only," << to_string(report.case_taken) << ',' << format_double(report.a_star)
        << ',' << format_double(report.a_bar_N) << ',' << format_double(report.objective) << ','
        << format_double(report.fixed_point_residual);
    for (double l : report.layers_star) out << ',' << format_double(l);
    out << '\n';
    return out.str();
}

std::string sweep_to_csv(const SweepTable& table) {
    static const char* axis_names[] = {"w", "gamma", "eta", "s_shift"};
    std::ostringstream out;
    out << axis_names[static_cast<int>(table.axis)] << ",a_star,d_star,limit,objective,case\n";
    for (const SweepRow& row : table.rows) {
        out << format_double(row.axis_value) << ',';
        if (row.ok) {
            out << format_double(row.report.a_star) << ',' << format_double(row.report.d_star)
                << ',' << format_double(row.report.a_star + row.report.d_star) << ','
                << format_double(row.report.objective) << ','
                << to_string(row.report.case_taken) << '\n';
        } else {
            out << "NA,NA,NA,NA,NA\n";
        }
    }
    return out.str();
}

MarketScenario builtin_scenario(int id) {
    // Shared loss: 10% atoms at 0 and at max loss 10, the rest a truncated
    // Pareto body (scale 10, shape 3) over (0, 10).
    LossDistribution loss({{0.0, 0.1}, {10.0, 0.1}},
                          {{0.0, 10.0, TruncatedParetoKernel{10.0, 3.0}, 0.8}}, 10.0);
    if (id == 2) {
        BackgroundRisk background({{5.0, 1.0}});
        return MarketScenario(std::move(loss), std::move(background), UtilityModel::power(0.5),
                              15.0, 0.2, 1.0);
    }
    if (id == 4) {
        BackgroundRisk background({{2.0, 0.1}, {8.0, 0.9}});
        return MarketScenario(std::move(loss), std::move(background), UtilityModel::power(0.5),
                              15.0, 0.1, 1.0);
    }
    throw ValidationError("unknown builtin scenario id " + std::to_string(id) +
                          " (expected 2 or 4)");
}

}  // namespace indemnify
