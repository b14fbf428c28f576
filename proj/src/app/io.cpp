#include "retro/app/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace retro::io {

namespace {

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw FormatError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(where + ": missing \"" + key + "\"");
    return *it;
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw FormatError(where + ": expected a number");
    return j.get<double>();
}

std::size_t dimension(const Json& obj) {
    const Json& d = field(obj, "dim", "file");
    if (!d.is_number_integer() || d.get<long long>() < 1)
        throw FormatError("file: \"dim\" must be a positive integer");
    return d.get<std::size_t>();
}

const Json& array(const Json& j, const std::string& where) {
    if (!j.is_array()) throw FormatError(where + ": expected an array");
    return j;
}

std::string at(const std::string& where, std::size_t k) { return where + "[" + std::to_string(k) + "]"; }

}  // namespace

Json to_json(linalg::Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const linalg::Vector& v) {
    Json out = Json::array();
    for (const auto& z : v) out.push_back(to_json(z));
    return out;
}

Json to_json(const linalg::Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

linalg::Complex complex_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw FormatError(where + ": expected [re, im]");
    return {number(j[0], where), number(j[1], where)};
}

linalg::Vector vector_from_json(const Json& j, std::size_t dim, const std::string& where) {
    array(j, where);
    if (j.size() != dim) throw DimensionMismatch(dim, j.size(), where);
    linalg::Vector v;
    for (std::size_t k = 0; k < dim; ++k) v.push_back(complex_from_json(j[k], at(where, k)));
    return v;
}

linalg::Matrix matrix_from_json(const Json& j, std::size_t dim, const std::string& where) {
    array(j, where);
    if (j.size() != dim) throw DimensionMismatch(dim, j.size(), where + " rows");
    linalg::Matrix m(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        const auto row = vector_from_json(j[r], dim, at(where, r));
        for (std::size_t c = 0; c < dim; ++c) m(r, c) = row[c];
    }
    return m;
}

EnsembleFile EnsembleFile::from(const Ensemble& e) {
    EnsembleFile f{e.dim(), e.priors(), {}};
    for (const auto& s : e.states()) f.states.emplace_back(s.matrix());
    return f;
}

EnsembleFile EnsembleFile::from_pure(const std::vector<PureState>& states, std::vector<double> priors) {
    if (states.empty()) throw InvalidParameter("ensemble needs at least one state");
    EnsembleFile f{states.front().dim(), std::move(priors), {}};
    for (const auto& s : states) f.states.emplace_back(s.amplitudes());
    return f;
}

ValidationReport EnsembleFile::validate() const {
    ValidationReport report;
    std::vector<linalg::Matrix> matrices;
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (const auto* v = std::get_if<linalg::Vector>(&states[k])) {
            const double residual = std::abs(linalg::norm(*v) - 1.0);
            if (!(residual <= kStateTol)) report.add("unit norm", at("states", k), residual, kStateTol);
            matrices.push_back(linalg::outer(*v, *v));
        } else {
            matrices.push_back(std::get<linalg::Matrix>(states[k]));
        }
    }
    auto rest = validate_ensemble(matrices, priors);
    report.violations.insert(report.violations.end(), rest.violations.begin(), rest.violations.end());
    return report;
}

Ensemble EnsembleFile::to_ensemble() const {
    auto report = validate();
    if (!report.ok()) throw ValidationError(std::move(report));
    std::vector<DensityOperator> rhos;
    for (const auto& s : states) {
        if (const auto* v = std::get_if<linalg::Vector>(&s)) rhos.push_back(PureState(*v).density());
        else rhos.emplace_back(std::get<linalg::Matrix>(s));
    }
    return Ensemble(std::move(rhos), priors);
}

PovmFile PovmFile::from(const Povm& p) {
    PovmFile f{p.dim(), {}};
    for (const auto& e : p.elements()) f.elements.push_back(e.matrix());
    return f;
}

ValidationReport PovmFile::validate() const { return validate_povm(elements); }

Povm PovmFile::to_povm() const {
    auto report = validate();
    if (!report.ok()) throw ValidationError(std::move(report));
    return Povm::from_matrices(elements);
}

Json to_json(const EnsembleFile& f) {
    Json states = Json::array();
    for (const auto& s : f.states) {
        if (const auto* v = std::get_if<linalg::Vector>(&s))
            states.push_back({{"pure", true}, {"amplitudes", to_json(*v)}});
        else
            states.push_back({{"pure", false}, {"matrix", to_json(std::get<linalg::Matrix>(s))}});
    }
    return {{"dim", f.dim}, {"priors", f.priors}, {"states", std::move(states)}};
}

Json to_json(const PovmFile& f) {
    Json elements = Json::array();
    for (const auto& m : f.elements) elements.push_back(to_json(m));
    return {{"dim", f.dim}, {"elements", std::move(elements)}};
}

EnsembleFile ensemble_file_from_json(const Json& j) {
    EnsembleFile f;
    f.dim = dimension(j);
    const Json& priors = array(field(j, "priors", "file"), "priors");
    const Json& states = array(field(j, "states", "file"), "states");
    for (std::size_t k = 0; k < priors.size(); ++k) f.priors.push_back(number(priors[k], at("priors", k)));
    if (states.empty()) throw FormatError("states: at least one state is required");
    for (std::size_t k = 0; k < states.size(); ++k) {
        const std::string where = at("states", k);
        const Json& s = states[k];
        const Json& pure = field(s, "pure", where);
        if (!pure.is_boolean()) throw FormatError(where + ": \"pure\" must be true or false");
        if (pure.get<bool>())
            f.states.emplace_back(vector_from_json(field(s, "amplitudes", where), f.dim, where + ".amplitudes"));
        else
            f.states.emplace_back(matrix_from_json(field(s, "matrix", where), f.dim, where + ".matrix"));
    }
    return f;
}

PovmFile povm_file_from_json(const Json& j) {
    PovmFile f;
    f.dim = dimension(j);
    const Json& elements = array(field(j, "elements", "file"), "elements");
    if (elements.empty()) throw FormatError("elements: at least one element is required");
    for (std::size_t k = 0; k < elements.size(); ++k)
        f.elements.push_back(matrix_from_json(elements[k], f.dim, at("elements", k)));
    return f;
}

namespace {
Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}
}  // namespace

EnsembleFile parse_ensemble(const std::string& text) { return ensemble_file_from_json(parse_json(text)); }
PovmFile parse_povm(const std::string& text) { return povm_file_from_json(parse_json(text)); }
std::string serialize(const EnsembleFile& f) { return to_json(f).dump(2) + "\n"; }
std::string serialize(const PovmFile& f) { return to_json(f).dump(2) + "\n"; }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParameter("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidParameter("cannot write " + path.string());
    out << text;
    if (!out) throw InvalidParameter("failed writing " + path.string());
}

Ensemble load_ensemble(const std::filesystem::path& path) {
    try {
        return parse_ensemble(read_text(path)).to_ensemble();
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Povm load_povm(const std::filesystem::path& path) {
    try {
        return parse_povm(read_text(path)).to_povm();
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace retro::io
