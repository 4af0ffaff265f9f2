#include "flatmod/report.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <functional>
#include <sstream>

namespace flatmod {

using nlohmann::json;

namespace {

json matrix_json(const QMatrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j).str());
        rows.push_back(row);
    }
    return rows;
}

QMatrix matrix_from(const json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    const auto m = n == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
    QMatrix M(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < m; ++k)
            M(i, k) = Rational::parse(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<std::string>());
    return M;
}

json vector_json(const QVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i).str());
    return out;
}

QVector vector_from(const json& j) {
    QVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = Rational::parse(j[i].get<std::string>());
    return v;
}

json mat2_json(const std::optional<Mat2>& m) {
    if (!m) return nullptr;
    return json::array({m->a, m->b, m->c, m->d});
}

std::optional<Mat2> mat2_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return Mat2{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>(), j[3].get<std::int64_t>()};
}

json surface_json(const SurfaceType& s) {
    return {{"genus", s.genus}, {"cusps", s.cusp_count}, {"cone_points", s.cone_points},
            {"underlying", s.underlying_name}, {"psl_index", s.psl_index}};
}

SurfaceType surface_from(const json& j) {
    SurfaceType s;
    s.genus = j.at("genus").get<int>();
    s.cusp_count = j.at("cusps").get<int>();
    s.cone_points = j.at("cone_points").get<std::vector<int>>();
    s.underlying_name = j.at("underlying").get<std::string>();
    s.psl_index = j.at("psl_index").get<std::size_t>();
    return s;
}

json ident_json(const BlockIdentification& b) {
    return {{"name", b.name}, {"conjugator", mat2_json(b.conjugator)}, {"index", b.index}};
}

BlockIdentification ident_from(const json& j) {
    BlockIdentification b;
    b.name = j.at("name").get<std::string>();
    b.conjugator = mat2_from(j.at("conjugator"));
    b.index = j.at("index").get<std::size_t>();
    return b;
}

json block_json(const ArithmeticBlock& a) {
    json j{{"block_coordinates", a.block_coordinates},
           {"line_coordinates", a.line_coordinates},
           {"subgroup", ident_json(a.subgroup)},
           {"block_surface", surface_json(a.block_surface)},
           {"swap_in_finite_part", a.swap_in_finite_part},
           {"coupling", mat2_json(a.coupling)},
           {"coupling_coset", a.coupling_coset},
           {"coupling_conjugator", mat2_json(a.coupling_conjugator)},
           {"union_subgroup", a.union_subgroup ? ident_json(*a.union_subgroup) : json(nullptr)},
           {"union_surface", a.union_surface ? surface_json(*a.union_surface) : json(nullptr)},
           {"involution_summary", a.involution_summary},
           {"involution_identity", a.involution_identity},
           {"involution_fixed_point", a.involution_fixed_point}};
    return j;
}

ArithmeticBlock block_from(const json& j) {
    ArithmeticBlock a;
    a.block_coordinates = j.at("block_coordinates").get<std::vector<int>>();
    a.line_coordinates = j.at("line_coordinates").get<std::vector<int>>();
    a.subgroup = ident_from(j.at("subgroup"));
    a.block_surface = surface_from(j.at("block_surface"));
    a.swap_in_finite_part = j.at("swap_in_finite_part").get<bool>();
    a.coupling = mat2_from(j.at("coupling"));
    a.coupling_coset = j.at("coupling_coset").get<std::string>();
    a.coupling_conjugator = mat2_from(j.at("coupling_conjugator"));
    if (!j.at("union_subgroup").is_null()) a.union_subgroup = ident_from(j.at("union_subgroup"));
    if (!j.at("union_surface").is_null()) a.union_surface = surface_from(j.at("union_surface"));
    a.involution_summary = j.at("involution_summary").get<std::string>();
    a.involution_identity = j.at("involution_identity").get<bool>();
    a.involution_fixed_point = j.at("involution_fixed_point").get<bool>();
    return a;
}

json normalizer_json(const NormalizerDescription& nd) {
    json gens = json::array(), elems = json::array(), wits = json::array();
    for (const auto& X : nd.finite_generators) gens.push_back(matrix_json(X));
    for (const auto& X : nd.finite_elements) elems.push_back(matrix_json(X));
    for (const auto& w : nd.witnesses)
        wits.push_back({{"matrix", matrix_json(w.matrix)}, {"translation", vector_json(w.translation)}});
    return {{"group", nd.group},
            {"bound", nd.bound},
            {"finite_generators", gens},
            {"finite_elements", elems},
            {"witnesses", wits},
            {"finite_order", nd.finite_order ? json(*nd.finite_order) : json(nullptr)},
            {"arithmetic_block", nd.arithmetic_block ? block_json(*nd.arithmetic_block) : json(nullptr)},
            {"rotation_block", nd.rotation_block},
            {"shape", nd.shape},
            {"bracket_only", nd.bracket_only},
            {"bracket_position", nd.bracket_position}};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ParseError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

OutputFormat parse_format(const std::string& s) {
    if (s == "text") return OutputFormat::Text;
    if (s == "structured" || s == "json") return OutputFormat::Structured;
    throw PreconditionViolated("unknown output format '" + s + "' (expected text or structured)");
}

void RunConfiguration::check() const {
    if (bound < 0) throw PreconditionViolated("--bound must be non-negative");
    if (word_bound <= 0) throw PreconditionViolated("--word-bound must be positive");
    if (coset_cap == 0) throw PreconditionViolated("coset cap must be positive");
}

std::string serialize(const NormalizerDescription& nd) { return normalizer_json(nd).dump(1); }

NormalizerDescription deserialize_normalizer(const std::string& document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("normalizer cache entry: ") + e.what());
    }
    try {
        NormalizerDescription nd;
        nd.group = j.at("group").get<std::string>();
        nd.bound = j.at("bound").get<int>();
        for (const auto& X : j.at("finite_generators")) nd.finite_generators.push_back(matrix_from(X));
        for (const auto& X : j.at("finite_elements")) nd.finite_elements.push_back(matrix_from(X));
        for (const auto& w : j.at("witnesses"))
            nd.witnesses.push_back({matrix_from(w.at("matrix")), vector_from(w.at("translation"))});
        if (!j.at("finite_order").is_null()) nd.finite_order = j.at("finite_order").get<std::size_t>();
        if (!j.at("arithmetic_block").is_null()) nd.arithmetic_block = block_from(j.at("arithmetic_block"));
        nd.rotation_block = j.at("rotation_block").get<std::vector<int>>();
        nd.shape = j.at("shape").get<std::string>();
        nd.bracket_only = j.at("bracket_only").get<bool>();
        nd.bracket_position = j.at("bracket_position").get<std::string>();
        return nd;
    } catch (const json::exception& e) {
        throw ParseError(std::string("normalizer cache entry: ") + e.what());
    }
}

std::string content_hash(const std::string& bytes) {
    std::ostringstream ss;
    ss << std::hex << std::hash<std::string>{}(bytes);
    return ss.str();
}

NormalizerCache::NormalizerCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path NormalizerCache::entry_path(const std::string& group, int bound) const {
    return dir_ / "cache" / (group + ".bound" + std::to_string(bound) + ".json");
}

std::optional<NormalizerDescription> NormalizerCache::get(const std::string& group, int bound,
                                                          const std::string& hash) const {
    const auto p = entry_path(group, bound);
    if (!std::filesystem::exists(p)) return std::nullopt;
    try {
        json j = json::parse(read_file(p));
        if (j.at("corpus_hash").get<std::string>() != hash) return std::nullopt;
        return deserialize_normalizer(j.at("normalizer").dump());
    } catch (const std::exception&) {
        return std::nullopt;  // unreadable entries are recomputed
    }
}

void NormalizerCache::put(const std::string& group, int bound, const std::string& hash,
                          const NormalizerDescription& nd) const {
    const auto p = entry_path(group, bound);
    std::filesystem::create_directories(p.parent_path());
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ParseError("cannot write " + tmp);
        out << json{{"corpus_hash", hash}, {"normalizer", normalizer_json(nd)}}.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, p);
}

std::string normalizer_summary(const NormalizerDescription& nd) {
    std::ostringstream s;
    if (nd.finite_order) s << "finite part of order " << *nd.finite_order;
    else s << "finite part";
    s << " with " << nd.finite_generators.size() << " generators";
    if (nd.arithmetic_block) {
        const auto& a = *nd.arithmetic_block;
        s << "; identity-extension block subgroup " << a.subgroup.to_string() << " (" << a.block_surface.to_string()
          << ")";
        if (a.swap_in_finite_part) s << "; line swap in the finite part";
        if (a.coupling) {
            s << "; coupling B0 = " << a.coupling->str() << ", coset " << a.coupling_coset << ", union "
              << a.union_subgroup->to_string() << " (" << a.union_surface->to_string() << ")";
        }
    }
    if (!nd.shape.empty()) s << "; rotation-block shape " << nd.shape;
    if (nd.bracket_only) s << "; bracketed (" << nd.bracket_position << " the containment bounds)";
    return s.str();
}

ComputedModuli compute_moduli(const std::filesystem::path& file, const RunConfiguration& cfg,
                              const NormalizerCache* cache, ManifoldReport* report) {
    const std::string bytes = read_file(file);
    const auto p = parse_presentation(bytes);
    const Group g = build_group(p);
    const auto d = isotypic_decomposition(g.holonomy);
    const std::string hash = content_hash(bytes);
    std::optional<NormalizerDescription> nd;
    if (cache) nd = cache->get(p.name, cfg.bound, hash);
    if (!nd) {
        nd = normalizer_matrix_part(g, cfg.bound, cfg.word_bound);
        if (cache) cache->put(p.name, cfg.bound, hash, *nd);
    }
    ComputedModuli cm;
    cm.expression = assemble_moduli(d, *nd);
    cm.bracketed = nd->bracket_only;
    if (report) {
        report->name = p.name;
        report->teichmuller = teichmuller_space(d).to_string();
        report->normalizer_summary = normalizer_summary(*nd);
        report->moduli_expression = cm.expression.to_string();
        report->topological_form = topological_form(cm.expression).to_string();
    }
    return cm;
}

ManifoldReport moduli_report(const std::filesystem::path& file, const RunConfiguration& cfg,
                             const NormalizerCache* cache) {
    ManifoldReport r;
    ComputedModuli cm = compute_moduli(file, cfg, cache, &r);
    auto rows = verify_against_reference({{r.name, cm}});
    for (const auto& row : rows)
        if (row.name == r.name) {
            r.reference_match = row.reference_match;
            r.note = row.note;
            if (row.reference_match == "FAIL") r.note = "expected " + row.expected;
        }
    if (r.reference_match.empty()) r.note = "not listed among the reference entries";
    return r;
}

std::string format_report(const std::vector<ManifoldReport>& reports, OutputFormat f) {
    if (f == OutputFormat::Structured) {
        json arr = json::array();
        for (const auto& r : reports)
            arr.push_back({{"name", r.name},
                           {"teichmuller", r.teichmuller},
                           {"normalizer_summary", r.normalizer_summary},
                           {"moduli_expression", r.moduli_expression},
                           {"topological_form", r.topological_form},
                           {"reference_match", r.reference_match},
                           {"note", r.note}});
        return json{{"format", "flatmod-moduli-report"}, {"version", 1}, {"manifolds", arr}}.dump(2) + "\n";
    }
    std::ostringstream s;
    for (const auto& r : reports) {
        s << "name: " << r.name << "\n"
          << "teichmuller: " << r.teichmuller << "\n"
          << "normalizer_summary: " << r.normalizer_summary << "\n"
          << "moduli_expression: " << r.moduli_expression << "\n"
          << "topological_form: " << r.topological_form << "\n"
          << "reference_match: " << (r.reference_match.empty() ? "-" : r.reference_match) << "\n";
        if (!r.note.empty()) s << "note: " << r.note << "\n";
    }
    return s.str();
}

std::string format_verification(const std::vector<VerificationRow>& rows, OutputFormat f) {
    if (f == OutputFormat::Structured) {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"name", r.name},
                           {"item", r.item},
                           {"computed", r.computed},
                           {"expected", r.expected},
                           {"computed_topological", r.computed_topological},
                           {"expected_topological", r.expected_topological},
                           {"computed_contractible", r.computed_contractible},
                           {"expected_contractible", r.expected_contractible},
                           {"reference_match", r.reference_match},
                           {"note", r.note}});
        return json{{"format", "flatmod-verification"}, {"version", 1}, {"rows", arr}}.dump(2) + "\n";
    }
    std::ostringstream s;
    std::size_t pass = 0, fail = 0, bracketed = 0, absent = 0;
    std::vector<const VerificationRow*> brackets;
    for (const auto& r : rows) {
        if (r.reference_match == "BRACKETED") {
            brackets.push_back(&r);
            ++bracketed;
            continue;
        }
        s << r.reference_match << "  " << r.name << " [" << r.item << "]  " << r.computed;
        if (r.reference_match == "FAIL" || r.reference_match == "ABSENT") {
            s << "\n      expected: " << r.expected << " | " << r.expected_topological
              << (r.expected_contractible ? " (contractible)" : "");
            if (!r.computed.empty())
                s << "\n      computed: " << r.computed << " | " << r.computed_topological
                  << (r.computed_contractible ? " (contractible)" : "");
            if (!r.note.empty()) s << "\n      note: " << r.note;
        } else {
            s << " | " << r.computed_topological << (r.computed_contractible ? " (contractible)" : "");
        }
        s << "\n";
        if (r.reference_match == "PASS") ++pass;
        if (r.reference_match == "FAIL") ++fail;
        if (r.reference_match == "ABSENT") ++absent;
    }
    if (!brackets.empty()) {
        s << "bracketed normalizers:\n";
        for (const auto* r : brackets)
            s << "BRACKETED  " << r->name << " [" << r->item << "]  " << r->computed << " | " << r->computed_topological
              << "\n";
    }
    s << "summary: " << pass << " PASS, " << fail << " FAIL, " << bracketed << " BRACKETED, " << absent << " ABSENT\n";
    return s.str();
}

}  // namespace flatmod
