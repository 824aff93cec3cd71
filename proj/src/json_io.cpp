#include "polybell/json_io.hpp"

#include <fstream>

namespace polybell {

using nlohmann::json;

json to_json(const Scenario& sc) {
    return json{{"a_outcomes", sc.a_outcomes}, {"b_outcomes", sc.b_outcomes}};
}

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    sc.a_outcomes = j.at("a_outcomes").get<std::vector<int>>();
    sc.b_outcomes = j.at("b_outcomes").get<std::vector<int>>();
    sc.validate();
    return sc;
}

json to_json(const BellExpression& expr) {
    json joint = json::array();
    for (const auto& t : expr.joint)
        joint.push_back({{"a_set", t.a_set},
                         {"b_set", t.b_set},
                         {"a_out", t.a_out},
                         {"b_out", t.b_out},
                         {"coeff", t.coeff}});
    auto marg = [](const std::vector<MarginalTerm>& terms) {
        json out = json::array();
        for (const auto& t : terms)
            out.push_back({{"set", t.setting},
                           {"out", t.outcome},
                           {"coeff", t.coeff},
                           {"partner", t.partner}});
        return out;
    };
    return json{{"scenario", to_json(expr.scenario)},
                {"constant", expr.constant},
                {"joint", joint},
                {"a_marginal", marg(expr.a_marginal)},
                {"b_marginal", marg(expr.b_marginal)}};
}

BellExpression expression_from_json(const json& j) {
    BellExpression e;
    e.scenario = scenario_from_json(j.at("scenario"));
    e.constant = j.value("constant", 0.0);
    for (const auto& t : j.value("joint", json::array()))
        e.joint.push_back({t.at("a_set").get<int>(), t.at("b_set").get<int>(),
                           t.at("a_out").get<int>(), t.at("b_out").get<int>(),
                           t.at("coeff").get<double>()});
    for (const auto& t : j.value("a_marginal", json::array()))
        e.a_marginal.push_back({t.at("set").get<int>(), t.at("out").get<int>(),
                                t.at("coeff").get<double>(), t.value("partner", 1)});
    for (const auto& t : j.value("b_marginal", json::array()))
        e.b_marginal.push_back({t.at("set").get<int>(), t.at("out").get<int>(),
                                t.at("coeff").get<double>(), t.value("partner", 1)});
    e.validate();
    return e;
}

BellExpression load_expression(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open expression file: " + path);
    json j;
    in >> j;
    return expression_from_json(j);
}

void save_expression(const BellExpression& expr, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << to_json(expr).dump(2) << "\n";
}

json to_json(const CorrelationTable& table) {
    const Scenario& sc = table.scenario();
    json blocks = json::array();
    for (int mu = 1; mu <= sc.a_settings(); ++mu)
        for (int nu = 1; nu <= sc.b_settings(); ++nu) {
            json rows = json::array();
            for (int k = 1; k <= sc.a_outcomes[mu - 1]; ++k) {
                json row = json::array();
                for (int l = 1; l <= sc.b_outcomes[nu - 1]; ++l)
                    row.push_back(table.p(mu, nu, k, l));
                rows.push_back(std::move(row));
            }
            blocks.push_back({{"a_set", mu}, {"b_set", nu}, {"p", rows}});
        }
    return json{{"scenario", to_json(sc)}, {"blocks", blocks}};
}

CorrelationTable table_from_json(const json& j) {
    const Scenario sc = scenario_from_json(j.at("scenario"));
    std::vector<std::vector<double>> blocks(
        static_cast<size_t>(sc.a_settings()) * sc.b_settings());
    for (const auto& b : j.at("blocks")) {
        const int mu = b.at("a_set").get<int>();
        const int nu = b.at("b_set").get<int>();
        if (mu < 1 || mu > sc.a_settings() || nu < 1 || nu > sc.b_settings())
            throw std::invalid_argument("block setting out of range");
        const auto& rows = b.at("p");
        std::vector<double> blk;
        for (const auto& row : rows)
            for (const auto& v : row) blk.push_back(v.get<double>());
        blocks[(mu - 1) * sc.b_settings() + (nu - 1)] = std::move(blk);
    }
    return CorrelationTable::from_blocks(sc, std::move(blocks));
}

namespace {

json matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
    const long rows = static_cast<long>(j.size());
    if (rows == 0) return {};
    const long cols = static_cast<long>(j.at(0).size());
    Eigen::MatrixXcd m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long c = 0; c < cols; ++c) {
            const auto& cell = j.at(i).at(c);
            m(i, c) = std::complex<double>(cell.at(0).get<double>(),
                                           cell.at(1).get<double>());
        }
    return m;
}

}  // namespace

json to_json(const QuantumModel& model) {
    auto effects = [](const std::vector<std::vector<Eigen::MatrixXcd>>& party) {
        json out = json::array();
        for (const auto& setting : party) {
            json s = json::array();
            for (const auto& e : setting) s.push_back(matrix_to_json(e));
            out.push_back(std::move(s));
        }
        return out;
    };
    return json{{"dim_a", model.dim_a},
                {"dim_b", model.dim_b},
                {"state", matrix_to_json(model.state)},
                {"a_effects", effects(model.a_effects)},
                {"b_effects", effects(model.b_effects)}};
}

QuantumModel model_from_json(const json& j) {
    QuantumModel m;
    m.dim_a = j.at("dim_a").get<int>();
    m.dim_b = j.at("dim_b").get<int>();
    m.state = matrix_from_json(j.at("state"));
    for (const auto& setting : j.at("a_effects")) {
        std::vector<Eigen::MatrixXcd> s;
        for (const auto& e : setting) s.push_back(matrix_from_json(e));
        m.a_effects.push_back(std::move(s));
    }
    for (const auto& setting : j.at("b_effects")) {
        std::vector<Eigen::MatrixXcd> s;
        for (const auto& e : setting) s.push_back(matrix_from_json(e));
        m.b_effects.push_back(std::move(s));
    }
    m.validate(1e-7);
    return m;
}

json to_json(const SdpProblem& problem) {
    json fixed = json::array();
    for (const auto& c : problem.fixed)
        fixed.push_back(json::array({c.row, c.col, c.value}));
    json vars = json::array();
    for (size_t i = 0; i < problem.entries.size(); ++i) {
        json cells = json::array();
        for (const auto& c : problem.entries[i])
            cells.push_back(json::array({c.row, c.col, c.value}));
        json var{{"cells", cells}, {"objective", problem.objective[i]}};
        if (i < problem.variable_names.size()) var["name"] = problem.variable_names[i];
        vars.push_back(std::move(var));
    }
    json eqs = json::array();
    for (const auto& eq : problem.equalities) {
        json terms = json::array();
        for (const auto& [v, c] : eq.terms) terms.push_back(json::array({v, c}));
        eqs.push_back({{"terms", terms}, {"rhs", eq.rhs}});
    }
    return json{{"dimension", problem.dimension},
                {"objective_constant", problem.objective_constant},
                {"fixed", fixed},
                {"variables", vars},
                {"equalities", eqs}};
}

SdpProblem sdp_problem_from_json(const json& j) {
    SdpProblem p;
    p.dimension = j.at("dimension").get<int>();
    p.objective_constant = j.value("objective_constant", 0.0);
    for (const auto& c : j.value("fixed", json::array()))
        p.fixed.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>()});
    for (const auto& var : j.at("variables")) {
        std::vector<SdpCell> cells;
        for (const auto& c : var.at("cells"))
            cells.push_back(
                {c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>()});
        p.entries.push_back(std::move(cells));
        p.objective.push_back(var.value("objective", 0.0));
        if (var.contains("name")) {
            p.variable_names.resize(p.entries.size());
            p.variable_names.back() = var.at("name").get<std::string>();
        }
    }
    if (!p.variable_names.empty()) p.variable_names.resize(p.entries.size());
    for (const auto& eq : j.value("equalities", json::array())) {
        SdpProblem::Equality e;
        for (const auto& t : eq.at("terms"))
            e.terms.push_back({t.at(0).get<int>(), t.at(1).get<double>()});
        e.rhs = eq.at("rhs").get<double>();
        p.equalities.push_back(std::move(e));
    }
    p.validate();
    return p;
}

json to_json(const SolveResult& result) {
    return json{{"status", to_string(result.status)},
                {"value", result.value},
                {"upper_value", result.upper_value},
                {"duality_gap", result.duality_gap},
                {"primal_residual", result.primal_residual},
                {"dual_residual", result.dual_residual},
                {"iterations", result.iterations},
                {"message", result.message}};
}

}  // namespace polybell
