// polybell: local, non-signaling, quantum and outcome-restricted bounds on
// bipartite Bell expressions, with see-saw lower bounds, visibility
// thresholds and statistical evaluation of count data.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "polybell/analysis.hpp"
#include "polybell/json_io.hpp"
#include "polybell/local_bound.hpp"
#include "polybell/lp.hpp"
#include "polybell/ncalgebra.hpp"
#include "polybell/nonsignaling.hpp"
#include "polybell/seesaw.hpp"

using namespace polybell;
using nlohmann::json;

namespace {

double now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct ExprChoice {
    std::string name;  // builder name or data-file stem
    std::string file;  // explicit path wins
};

bool is_builder(const std::string& name) {
    return name == "I3" || name == "I4" || name == "CH" || name == "VB" ||
           name == "VBprime";
}

// Named expressions come from the builders; anything else (e.g. AN) is a data
// file looked up under POLYBELL_DATA_DIR, ./data or ../data.
BellExpression resolve_expression(const ExprChoice& choice) {
    if (!choice.file.empty()) return load_expression(choice.file);
    if (choice.name.empty()) throw std::invalid_argument("need --expr or --expr-file");
    if (is_builder(choice.name)) return build_named(choice.name);

    std::string stem = choice.name;
    for (auto& c : stem) c = static_cast<char>(std::tolower(c));
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("POLYBELL_DATA_DIR")) dirs.push_back(env);
    dirs.push_back("data");
    dirs.push_back("../data");
    for (const auto& dir : dirs) {
        const auto path = std::filesystem::path(dir) / (stem + ".json");
        if (std::filesystem::exists(path)) return load_expression(path.string());
    }
    throw std::invalid_argument("unknown expression '" + choice.name +
                                "' and no data file " + stem + ".json found");
}

std::string default_level(const std::string& name) {
    if (name == "VB" || name == "VBprime" || name == "AN") return "3";
    return "2";
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

BellExpression negated(const BellExpression& e) {
    BellExpression out = e;
    out.constant = -out.constant;
    for (auto& t : out.joint) t.coeff = -t.coeff;
    for (auto& t : out.a_marginal) t.coeff = -t.coeff;
    for (auto& t : out.b_marginal) t.coeff = -t.coeff;
    return out;
}

json breakdown_json(const RestrictedBound& rb) {
    json arr = json::array();
    for (const auto& item : rb.breakdown)
        arr.push_back({{"restriction", item.restriction},
                       {"value", item.value},
                       {"status", to_string(item.status)},
                       {"gap", item.gap}});
    return arr;
}

void emit(const json& report, bool as_json) {
    if (as_json) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    const auto& res = report.at("results");
    for (auto it = res.begin(); it != res.end(); ++it) {
        if (it.value().is_number_float())
            std::cout << it.key() << " = " << fmt6(it.value().get<double>()) << "\n";
        else if (it.value().is_string() || it.value().is_number_integer() ||
                 it.value().is_boolean())
            std::cout << it.key() << " = " << it.value().dump() << "\n";
    }
    std::cout << "elapsed = " << fmt6(report.at("timing_seconds").get<double>()) << " s\n";
}

int run_or_report(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump(2) << "\n";
        return 1;
    }
}

// quantum (unrestricted) moment bound in a given direction
double quantum_bound(const BellExpression& expr, const std::string& level, double tol,
                     Direction dir, double* gap = nullptr) {
    const auto work = dir == Direction::Max ? expr : negated(expr);
    const auto ms = build_moment_sdp(work, std::nullopt, LevelSpec::parse(level));
    const auto res = solve(ms.problem, tol);
    if (!res.usable(tol)) throw solver_error("sdp failed: " + res.message);
    if (gap) *gap = res.duality_gap;
    return dir == Direction::Max ? res.value : -res.value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounds, models and statistics for bipartite Bell expressions"};
    app.require_subcommand(1);

    ExprChoice expr_choice;
    bool as_json = false;
    int jobs = 0;
    app.add_flag("--json", as_json, "machine-readable report, full precision");
    app.add_option("--jobs", jobs, "worker threads (0 = all cores)");

    auto* bound = app.add_subcommand("bound", "compute a bound on an expression");
    std::string bound_class, level_str, direction_str = "max";
    int n_restrict = 0;
    double tol = 1e-8;
    bool dedup = false;
    bound->add_option("--expr", expr_choice.name,
                      "expression name (I3, I4, CH, VB, VBprime, AN)");
    bound->add_option("--expr-file", expr_choice.file, "expression JSON file");
    bound->add_option("--class", bound_class, "local | ns | quantum | restricted")
        ->required();
    bound->add_option("--n", n_restrict, "outcome restriction size");
    bound->add_option("--level", level_str, "hierarchy level (1, 2, 3, 1+AB)");
    bound->add_option("--direction", direction_str, "max | min");
    bound->add_option("--tol", tol, "solver tolerance");
    bound->add_flag("--dedup", dedup, "orbit-reduce restrictions by expression symmetry");

    auto* ss = app.add_subcommand("seesaw", "see-saw lower bound with explicit model");
    int dim = 0, dim_b = 0, restarts = 20;
    uint64_t seed = 1;
    std::string model_out;
    ss->add_option("--expr", expr_choice.name, "expression name");
    ss->add_option("--expr-file", expr_choice.file, "expression JSON file");
    ss->add_option("--dim", dim, "local dimension (default: max outcome count)");
    ss->add_option("--dim-b", dim_b, "Bob's dimension when different");
    ss->add_option("--n", n_restrict, "restrict to n non-trivial outcomes per setting");
    ss->add_option("--restarts", restarts, "random restarts");
    ss->add_option("--seed", seed, "random seed");
    ss->add_option("--model-out", model_out, "write the best model as JSON");
    ss->add_flag("--dedup", dedup, "orbit-reduce restrictions by expression symmetry");

    auto* vis =
        app.add_subcommand("visibility", "white-noise visibility threshold of a bound");
    vis->add_option("--expr", expr_choice.name, "expression name");
    vis->add_option("--expr-file", expr_choice.file, "expression JSON file");
    vis->add_option("--n", n_restrict, "restriction size defining the bound")->required();
    vis->add_option("--level", level_str, "hierarchy level");
    vis->add_option("--dim", dim, "see-saw dimension");
    vis->add_option("--restarts", restarts, "see-saw restarts");
    vis->add_option("--seed", seed, "random seed");
    vis->add_option("--tol", tol, "solver tolerance");
    vis->add_flag("--dedup", dedup, "orbit-reduce restrictions by expression symmetry");

    auto* ev = app.add_subcommand("evaluate", "evaluate experimental counts");
    std::string counts_file, bound_class_ev = "restricted";
    ev->add_option("--expr", expr_choice.name, "expression name");
    ev->add_option("--expr-file", expr_choice.file, "expression JSON file");
    ev->add_option("--counts", counts_file, "CSV of event counts")->required();
    ev->add_option("--bound-class", bound_class_ev, "local | ns | quantum | restricted");
    ev->add_option("--n", n_restrict, "restriction size");
    ev->add_option("--level", level_str, "hierarchy level");
    ev->add_option("--tol", tol, "solver tolerance");
    ev->add_flag("--dedup", dedup, "orbit-reduce restrictions by expression symmetry");

    auto* ex = app.add_subcommand("expr", "dump a built-in expression as JSON");
    std::string expr_name, out_file;
    ex->add_option("--name", expr_name, "builder name")->required();
    ex->add_option("--out", out_file, "output file (default: stdout)");

    auto* sdp = app.add_subcommand("sdp-solve", "solve an SDP problem file");
    std::string sdp_in, sdp_out;
    sdp->add_option("--in", sdp_in, "SdpProblem JSON")->required();
    sdp->add_option("--out", sdp_out, "result JSON (default: stdout)");
    sdp->add_option("--tol", tol, "solver tolerance");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const double t0 = now_seconds();

    if (bound->parsed()) {
        return run_or_report([&] {
            const auto expr = resolve_expression(expr_choice);
            if (level_str.empty()) level_str = default_level(expr_choice.name);
            const auto dir = direction_str == "min" ? Direction::Min : Direction::Max;
            json results, config{{"expression", expr_choice.name},
                                 {"class", bound_class},
                                 {"direction", direction_str},
                                 {"tol", tol}};
            if (!expr_choice.file.empty()) config["expression_file"] = expr_choice.file;
            if (bound_class == "local") {
                const auto lb = local_bound(expr, dir);
                results["bound"] = lb.value;
                results["witness_a"] = lb.witness.a_choice;
                results["witness_b"] = lb.witness.b_choice;
            } else if (bound_class == "ns") {
                if (n_restrict > 0) {
                    const auto rb = nonsignaling_bound_over(expr, n_restrict, dir);
                    results["bound"] = rb.value;
                    json arr = json::array();
                    for (const auto& [key, v] : rb.breakdown)
                        arr.push_back({{"restriction", key}, {"value", v}});
                    results["breakdown"] = arr;
                    config["n"] = n_restrict;
                } else {
                    results["bound"] = nonsignaling_bound(expr, std::nullopt, dir);
                }
            } else if (bound_class == "quantum") {
                double gap = 0.0;
                results["bound"] = quantum_bound(expr, level_str, tol, dir, &gap);
                results["duality_gap"] = gap;
                config["level"] = level_str;
            } else if (bound_class == "restricted") {
                if (n_restrict < 1)
                    throw std::invalid_argument("--class restricted needs --n");
                BoundOptions opt;
                opt.tol = tol;
                opt.jobs = jobs;
                opt.dedup = dedup;
                const auto rb = restricted_bound(expr, n_restrict,
                                                 LevelSpec::parse(level_str), dir, opt);
                results["bound"] = rb.value;
                results["restrictions"] = rb.breakdown.size();
                results["family_size"] = rb.family_size;
                results["breakdown"] = breakdown_json(rb);
                config["n"] = n_restrict;
                config["level"] = level_str;
                config["dedup"] = dedup;
            } else {
                throw std::invalid_argument("unknown bound class '" + bound_class + "'");
            }
            emit(json{{"command", "bound"},
                      {"config", config},
                      {"results", results},
                      {"timing_seconds", now_seconds() - t0}},
                 as_json);
        });
    }

    if (ss->parsed()) {
        return run_or_report([&] {
            const auto expr = resolve_expression(expr_choice);
            if (dim == 0) dim = expr.scenario.max_outcomes();
            if (dim_b == 0) dim_b = dim;
            SeesawOptions opt;
            opt.restarts = restarts;
            opt.seed = seed;
            opt.jobs = jobs;

            json results;
            if (n_restrict > 0) {
                auto family = enumerate_restrictions(expr.scenario, n_restrict);
                if (dedup)
                    family = dedup_restrictions(family, expression_symmetries(expr));
                double best = 0;
                std::string best_key;
                json arr = json::array();
                std::optional<SeesawResult> best_res;
                for (const auto& r : family) {
                    const auto res = seesaw(expr, dim, dim_b, r, opt);
                    arr.push_back({{"restriction", r.key()}, {"value", res.value}});
                    if (!best_res || res.value > best) {
                        best = res.value;
                        best_key = r.key();
                        best_res = res;
                    }
                }
                results["value"] = best;
                results["restriction"] = best_key;
                results["breakdown"] = arr;
                if (!model_out.empty()) {
                    std::ofstream out(model_out);
                    out << to_json(best_res->model).dump(2) << "\n";
                }
            } else {
                const auto res = seesaw(expr, dim, dim_b, std::nullopt, opt);
                results["value"] = res.value;
                results["iterations"] = res.iterations;
                results["winning_restart"] = res.restart;
                results["failed_restarts"] = res.failed_restarts;
                if (!model_out.empty()) {
                    std::ofstream out(model_out);
                    out << to_json(res.model).dump(2) << "\n";
                }
            }
            emit(json{{"command", "seesaw"},
                      {"config",
                       {{"expression", expr_choice.name},
                        {"dim_a", dim},
                        {"dim_b", dim_b},
                        {"restarts", restarts},
                        {"seed", seed},
                        {"n", n_restrict}}},
                      {"results", results},
                      {"timing_seconds", now_seconds() - t0}},
                 as_json);
        });
    }

    if (vis->parsed()) {
        return run_or_report([&] {
            const auto expr = resolve_expression(expr_choice);
            if (level_str.empty()) level_str = default_level(expr_choice.name);
            if (dim == 0) dim = expr.scenario.max_outcomes();
            BoundOptions bopt;
            bopt.tol = tol;
            bopt.jobs = jobs;
            bopt.dedup = dedup;
            const auto rb = restricted_bound(expr, n_restrict, LevelSpec::parse(level_str),
                                             Direction::Max, bopt);
            SeesawOptions sopt;
            sopt.restarts = restarts;
            sopt.seed = seed;
            sopt.jobs = jobs;
            const auto target = seesaw(expr, dim, dim, std::nullopt, sopt);
            const auto white = white_noise_correlations(target.model);
            const auto rep = visibility_threshold(
                expr, correlations_of(target.model), white, rb.value,
                std::to_string(n_restrict) + "-outcome level " + level_str);
            emit(json{{"command", "visibility"},
                      {"config",
                       {{"expression", expr_choice.name},
                        {"n", n_restrict},
                        {"level", level_str},
                        {"dim", dim},
                        {"restarts", restarts},
                        {"seed", seed}}},
                      {"results",
                       {{"bound", rb.value},
                        {"target_value", rep.target_value},
                        {"white_value", rep.white_value},
                        {"visibility", rep.threshold},
                        {"visibility_percent", 100.0 * rep.threshold}}},
                      {"timing_seconds", now_seconds() - t0}},
                 as_json);
        });
    }

    if (ev->parsed()) {
        return run_or_report([&] {
            const auto expr = resolve_expression(expr_choice);
            if (level_str.empty()) level_str = default_level(expr_choice.name);
            const auto data = load_counts_csv(counts_file, expr.scenario);
            const auto est = evaluate_counts(expr, data);

            double bound_v = 0.0;
            if (bound_class_ev == "local") {
                bound_v = local_bound(expr, Direction::Max).value;
            } else if (bound_class_ev == "ns") {
                bound_v = n_restrict > 0
                              ? nonsignaling_bound_over(expr, n_restrict, Direction::Max)
                                    .value
                              : nonsignaling_bound(expr, std::nullopt, Direction::Max);
            } else if (bound_class_ev == "quantum") {
                bound_v = quantum_bound(expr, level_str, tol, Direction::Max);
            } else if (bound_class_ev == "restricted") {
                if (n_restrict < 1)
                    throw std::invalid_argument("--bound-class restricted needs --n");
                BoundOptions opt;
                opt.tol = tol;
                opt.jobs = jobs;
                opt.dedup = dedup;
                bound_v = restricted_bound(expr, n_restrict, LevelSpec::parse(level_str),
                                           Direction::Max, opt)
                              .value;
            } else {
                throw std::invalid_argument("unknown bound class '" + bound_class_ev + "'");
            }

            const double sigmas =
                est.sigma > 0
                    ? (est.value - bound_v) / est.sigma
                    : (est.value > bound_v ? std::numeric_limits<double>::infinity() : 0.0);
            emit(json{{"command", "evaluate"},
                      {"config",
                       {{"expression", expr_choice.name},
                        {"counts", counts_file},
                        {"bound_class", bound_class_ev},
                        {"n", n_restrict},
                        {"level", level_str}}},
                      {"results",
                       {{"value", est.value},
                        {"sigma", est.sigma},
                        {"total_events", est.total_events},
                        {"bound", bound_v},
                        {"violation_sigmas", sigmas}}},
                      {"timing_seconds", now_seconds() - t0}},
                 as_json);
        });
    }

    if (ex->parsed()) {
        return run_or_report([&] {
            const auto expr = build_named(expr_name);
            if (out_file.empty())
                std::cout << to_json(expr).dump(2) << "\n";
            else
                save_expression(expr, out_file);
        });
    }

    if (sdp->parsed()) {
        return run_or_report([&] {
            std::ifstream in(sdp_in);
            if (!in) throw std::invalid_argument("cannot open " + sdp_in);
            json j;
            in >> j;
            const auto res = solve(sdp_problem_from_json(j), tol);
            const json out = to_json(res);
            if (sdp_out.empty()) {
                std::cout << out.dump(2) << "\n";
            } else {
                std::ofstream o(sdp_out);
                o << out.dump(2) << "\n";
            }
            if (res.status == SolveStatus::Failed) throw solver_error(res.message);
        });
    }

    return 2;
}
