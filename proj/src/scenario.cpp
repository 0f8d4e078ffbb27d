#include "ilct/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ilct/builtin_data.hpp"
#include "ilct/errors.hpp"

namespace ilct {

using nlohmann::json;

namespace {

// Schema reader that remembers where it is for error messages.
class Reader {
  public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path_ + ": " + msg); }

    Reader at(const std::string& key) const {
        if (!j_.is_object()) fail("expected an object");
        auto it = j_.find(key);
        if (it == j_.end()) fail("missing key '" + key + "'");
        return Reader(*it, path_ + "/" + key);
    }
    std::optional<Reader> opt(const std::string& key) const {
        if (!j_.is_object()) fail("expected an object");
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return std::nullopt;
        return Reader(*it, path_ + "/" + key);
    }
    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
    std::vector<Reader> items() const {
        if (!j_.is_array()) fail("expected an array");
        std::vector<Reader> out;
        for (size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "/" + std::to_string(i));
        return out;
    }
    double number() const {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }
    int integer() const {
        if (!j_.is_number_integer() && !j_.is_number_unsigned()) fail("expected an integer");
        return j_.get<int>();
    }
    std::uint64_t unsigned_integer() const {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0)) {
            fail("expected a nonnegative integer");
        }
        return j_.get<std::uint64_t>();
    }
    std::string string() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }
    std::vector<double> numbers() const {
        std::vector<double> out;
        for (const Reader& r : items()) out.push_back(r.number());
        return out;
    }
    Poly poly() const { return Poly(numbers()); }
    Eigen::VectorXd vector() const {
        const auto v = numbers();
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    Eigen::MatrixXd matrix() const {
        const auto rows = items();
        if (rows.empty()) fail("empty matrix");
        const auto first = rows[0].numbers();
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(first.size()));
        for (size_t i = 0; i < rows.size(); ++i) {
            const auto r = rows[i].numbers();
            if (r.size() != first.size()) rows[i].fail("ragged matrix row");
            for (size_t j = 0; j < r.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
        }
        return m;
    }
    RationalMatrix rational_matrix() const {
        const auto rows = items();
        if (rows.empty()) fail("empty matrix");
        const size_t cols = rows[0].items().size();
        std::vector<RationalEntry> e;
        for (const Reader& row : rows) {
            const auto cells = row.items();
            if (cells.size() != cols) row.fail("ragged matrix row");
            for (const Reader& cell : cells) {
                const Poly den = cell.at("den").poly();
                if (den.is_zero()) cell.fail("zero denominator");
                e.push_back(normalized(cell.at("num").poly(), den));
            }
        }
        return RationalMatrix(static_cast<int>(rows.size()), static_cast<int>(cols), std::move(e));
    }
    SignalExpr expr() const {
        std::vector<SignalTerm> terms;
        for (const Reader& t : items()) {
            SignalTerm term;
            term.c = t.at("c").number();
            if (auto m = t.opt("m")) term.m = m->integer();
            if (term.m < 0) t.fail("negative power of t");
            if (auto a = t.opt("a")) term.a = a->number();
            if (auto w = t.opt("omega")) term.omega = w->number();
            if (auto p = t.opt("phi")) term.phi = p->number();
            terms.push_back(term);
        }
        return SignalExpr(std::move(terms));
    }
    SignalVector signal_vector() const {
        SignalVector out;
        for (const Reader& r : items()) out.push_back(r.expr());
        return out;
    }

  private:
    const json& j_;
    std::string path_;
};

json poly_json(const Poly& p) { return p.coeffs(); }

json matrix_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json rational_json(const RationalMatrix& g) {
    json out = json::array();
    for (int i = 0; i < g.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < g.cols(); ++j) row.push_back({{"num", poly_json(g(i, j).num)}, {"den", poly_json(g(i, j).den)}});
        out.push_back(row);
    }
    return out;
}

json expr_json(const SignalExpr& f) {
    json out = json::array();
    for (const SignalTerm& t : f.terms()) {
        out.push_back({{"c", t.c}, {"m", t.m}, {"a", t.a}, {"omega", t.omega}, {"phi", t.phi}});
    }
    return out;
}

json signal_vector_json(const SignalVector& v) {
    json out = json::array();
    for (const SignalExpr& f : v) out.push_back(expr_json(f));
    return out;
}

int line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

RationalMatrix s_times(const Eigen::MatrixXd& k) { return rm_times_s(RationalMatrix::constant(k)); }

SignalVector constants(const Eigen::VectorXd& v) {
    SignalVector out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i) == 0.0 ? SignalExpr() : SignalExpr::constant(v(i)));
    }
    return out;
}

}  // namespace

const CaseDef& Scenario::find_case(const std::string& case_name) const {
    for (const CaseDef& c : cases) {
        if (c.name == case_name) return c;
    }
    throw Error("scenario '" + name + "' has no case '" + case_name + "'");
}

void finalize_scenario(Scenario& s) {
    if (s.horizon <= 0.0 || s.nodes < 4) {
        throw DimensionError("grid needs T > 0 and N >= 4");
    }
    if (s.iterations < 0) {
        throw DimensionError("iteration count must be nonnegative");
    }
    if (s.cases.empty()) {
        throw DimensionError("scenario has no cases");
    }
    if (const auto* r = std::get_if<RationalPlantDef>(&s.plant_def)) {
        s.plant = make_plant(r->g1, r->g2, r->exo, s.seed);
    } else {
        const auto& ss = std::get<StateSpacePlantDef>(s.plant_def);
        s.plant = statespace_plant(ss.a, ss.b, ss.c, ss.x0, ss.w, s.seed);
    }
    s.gain = validate_gain(s.gamma, &s.plant);
    for (const CaseDef& c : s.cases) {
        if (static_cast<int>(c.yd.size()) != s.plant.q) {
            throw DimensionError("case '" + c.name + "': y_d must have q channels");
        }
        if (static_cast<int>(c.u0.size()) != s.plant.p) {
            throw DimensionError("case '" + c.name + "': u0 must have p channels");
        }
        if (c.ud2 && static_cast<int>(c.ud2->size()) != s.plant.p - s.plant.q) {
            throw DimensionError("case '" + c.name + "': ud2 must have p - q channels");
        }
    }
}

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const int line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
    }
    const Reader root(j, "");
    Scenario s;
    s.name = root.at("name").string();
    const Reader plant = root.at("plant");
    const std::string type = plant.at("type").string();
    if (type == "rational") {
        RationalPlantDef r;
        r.g1 = plant.at("G1").rational_matrix();
        r.g2 = plant.at("G2").rational_matrix();
        r.exo.d0 = plant.has("d0") ? plant.at("d0").vector() : Eigen::VectorXd::Zero(r.g2.cols());
        r.exo.dhat = plant.has("dhat") ? plant.at("dhat").signal_vector() : SignalVector(static_cast<size_t>(r.g2.cols()));
        s.plant_def = std::move(r);
    } else if (type == "state_space") {
        StateSpacePlantDef ss;
        ss.a = plant.at("A").matrix();
        ss.b = plant.at("B").matrix();
        ss.c = plant.at("C").matrix();
        ss.x0 = plant.has("x0") ? plant.at("x0").vector() : Eigen::VectorXd::Zero(ss.a.rows());
        ss.w = plant.has("w") ? plant.at("w").signal_vector() : SignalVector(static_cast<size_t>(ss.a.rows()));
        s.plant_def = std::move(ss);
    } else {
        plant.at("type").fail("unknown plant type '" + type + "' (rational or state_space)");
    }
    const Reader gain = root.at("gain");
    if (gain.has("gamma")) {
        s.gamma = gain.at("gamma").rational_matrix();
    } else if (gain.has("upsilon")) {
        s.gamma = s_times(gain.at("upsilon").matrix());
    } else {
        gain.fail("expected 'gamma' or 'upsilon'");
    }
    const Reader grid = root.at("grid");
    s.horizon = grid.at("T").number();
    s.nodes = grid.at("N").integer();
    s.iterations = root.at("iterations").integer();
    if (auto l = root.opt("lambda")) s.lambda = l->number();
    if (auto sd = root.opt("seed")) s.seed = sd->unsigned_integer();
    if (auto d = root.opt("disturbance")) {
        DisturbanceModel m;
        m.beta_theta = d->at("beta_theta").number();
        m.beta_thetahat = d->at("beta_thetahat").number();
        if (auto sd = d->opt("seed")) m.seed = sd->unsigned_integer();
        s.disturbance = m;
    }
    for (const Reader& c : root.at("cases").items()) {
        CaseDef cs;
        cs.name = c.at("name").string();
        cs.yd = c.at("yd").signal_vector();
        cs.u0 = c.at("u0").signal_vector();
        if (auto u2 = c.opt("ud2")) cs.ud2 = u2->signal_vector();
        s.cases.push_back(std::move(cs));
    }
    finalize_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    if (const auto* r = std::get_if<RationalPlantDef>(&s.plant_def)) {
        j["plant"] = {{"type", "rational"},
                      {"G1", rational_json(r->g1)},
                      {"G2", rational_json(r->g2)},
                      {"d0", vector_json(r->exo.d0)},
                      {"dhat", signal_vector_json(r->exo.dhat)}};
    } else {
        const auto& ss = std::get<StateSpacePlantDef>(s.plant_def);
        j["plant"] = {{"type", "state_space"}, {"A", matrix_json(ss.a)},   {"B", matrix_json(ss.b)},
                      {"C", matrix_json(ss.c)},  {"x0", vector_json(ss.x0)}, {"w", signal_vector_json(ss.w)}};
    }
    j["gain"] = {{"gamma", rational_json(s.gamma)}};
    j["grid"] = {{"T", s.horizon}, {"N", s.nodes}};
    j["iterations"] = s.iterations;
    if (s.lambda) j["lambda"] = *s.lambda;
    j["seed"] = s.seed;
    if (s.disturbance) {
        j["disturbance"] = {{"beta_theta", s.disturbance->beta_theta},
                            {"beta_thetahat", s.disturbance->beta_thetahat},
                            {"seed", s.disturbance->seed}};
    }
    json cases = json::array();
    for (const CaseDef& c : s.cases) {
        json cj = {{"name", c.name}, {"yd", signal_vector_json(c.yd)}, {"u0", signal_vector_json(c.u0)}};
        if (c.ud2) cj["ud2"] = signal_vector_json(*c.ud2);
        cases.push_back(cj);
    }
    j["cases"] = cases;
    return j;
}

std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

std::vector<std::string> builtin_names() { return {"example1", "example2", "dtype", "dtype_divergent"}; }

Scenario builtin_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "example1") {
        s.plant_def = RationalPlantDef{builtin::example1_g1(), builtin::example1_g2(), ExogenousInput::zero(3)};
        s.gamma = s_times(builtin::example1_gain());
        s.iterations = 100;
        for (char c : {'a', 'b', 'c'}) {
            s.cases.push_back({std::string(1, c), builtin::example1_yd(c), constants(builtin::example1_u0(c)), std::nullopt});
        }
    } else if (name == "example2") {
        s.plant_def = RationalPlantDef{builtin::example2_g1(), builtin::example2_g2(), ExogenousInput::zero(3)};
        s.gamma = s_times(builtin::example2_gain());
        s.iterations = 200;
        for (char c : {'d', 'e'}) {
            s.cases.push_back({std::string(1, c), builtin::example2_yd(), constants(builtin::example2_u0(c)), std::nullopt});
        }
    } else if (name == "dtype" || name == "dtype_divergent") {
        StateSpacePlantDef ss;
        ss.a.resize(3, 3);
        ss.a << -1, 1, 0, 0, -2, 1, 0, 0, -3;
        ss.b.resize(3, 2);
        ss.b << 1, 0, 0, 1, 1, 1;
        ss.c.resize(2, 3);
        ss.c << 1, 0, 0, 0, 1, 0;
        ss.x0 = Eigen::Vector3d(0.5, 0.0, 0.0);
        ss.w = SignalVector(3);
        s.plant_def = std::move(ss);
        const double k = name == "dtype" ? 0.8 : 2.5;
        s.gamma = s_times(k * Eigen::MatrixXd::Identity(2, 2));
        s.iterations = 150;
        s.cases.push_back({"nominal",
                           {SignalExpr::cos(0.5, 1.0), SignalExpr::sin(1.0, 1.0)},
                           SignalVector(2),
                           std::nullopt});
    } else {
        throw Error("unknown built-in scenario '" + name + "'");
    }
    finalize_scenario(s);
    return s;
}

Scenario resolve_scenario(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path)) {
        return load_scenario(name_or_path);
    }
    const auto names = builtin_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
        return builtin_scenario(name_or_path);
    }
    throw ParseError("'" + name_or_path + "' is neither a readable file nor a built-in scenario");
}

}  // namespace ilct
