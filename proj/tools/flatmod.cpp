#include "flatmod/congruence.hpp"
#include "flatmod/moduli.hpp"
#include "flatmod/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#ifndef FLATMOD_DEFAULT_CORPUS
#define FLATMOD_DEFAULT_CORPUS "corpus"
#endif

namespace fs = std::filesystem;
using namespace flatmod;

namespace {

enum Exit { Ok = 0, IoOrParse = 1, Validation = 2, Assembly = 3, Verification = 4 };

struct Target {
    std::string name;
    fs::path path;
};

std::vector<Target> corpus_files(const fs::path& corpus) {
    if (!fs::is_directory(corpus)) throw ParseError("corpus directory not found: " + corpus.string());
    std::vector<Target> out;
    for (const auto& e : fs::directory_iterator(corpus))
        if (e.is_regular_file() && e.path().extension() == ".json") out.push_back({e.path().stem().string(), e.path()});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

Target resolve(const std::string& arg, const fs::path& corpus) {
    fs::path p(arg);
    if (p.extension() == ".json" || fs::is_regular_file(p)) return {p.stem().string(), p};
    return {arg, corpus / (arg + ".json")};
}

std::vector<Target> targets(const std::vector<std::string>& names, bool all, const fs::path& corpus) {
    if (all) return corpus_files(corpus);
    if (names.empty()) throw CLI::ValidationError("give a group name, a path or --all");
    std::vector<Target> out;
    for (const auto& n : names) out.push_back(resolve(n, corpus));
    return out;
}

void emit(const std::string& text, const RunConfiguration& cfg, const std::string& stem) {
    std::cout << text;
    if (cfg.out_dir.empty()) return;
    fs::create_directories(cfg.out_dir);
    const fs::path p = cfg.out_dir / (stem + (cfg.format == OutputFormat::Structured ? ".json" : ".txt"));
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ParseError("cannot write " + p.string());
    out << text;
}

int cmd_validate(const std::vector<Target>& ts) {
    bool io = false, invalid = false;
    for (const auto& t : ts) {
        try {
            const auto p = load_presentation(t.path.string());
            const Group g = build_group(p);
            const bool tf = torsion_free(g);
            std::cout << p.name << ": holonomy order " << g.holonomy.order() << ", lattice closed, "
                      << (tf ? "torsion-free" : "NOT torsion-free") << "\n";
            invalid = invalid || !tf;
        } catch (const ParseError& e) {
            std::cerr << t.name << ": parse error: " << e.what() << "\n";
            io = true;
        } catch (const Error& e) {
            std::cout << t.name << ": invalid: " << e.what() << "\n";
            invalid = true;
        }
    }
    return io ? IoOrParse : invalid ? Validation : Ok;
}

int cmd_moduli(const std::vector<Target>& ts, const RunConfiguration& cfg) {
    std::optional<NormalizerCache> cache;
    if (!cfg.out_dir.empty()) cache.emplace(cfg.out_dir);
    std::vector<ManifoldReport> reports;
    int code = Ok;
    for (const auto& t : ts) {
        try {
            reports.push_back(moduli_report(t.path, cfg, cache ? &*cache : nullptr));
        } catch (const ParseError& e) {
            std::cerr << t.name << ": parse error: " << e.what() << "\n";
            code = std::max<int>(code, IoOrParse);
        } catch (const Error& e) {
            std::cerr << t.name << ": assembly failed: " << e.what() << "\n";
            code = std::max<int>(code, Assembly);
        }
    }
    emit(format_report(reports, cfg.format), cfg, ts.size() == 1 ? "moduli_" + ts.front().name : "moduli");
    return code;
}

int cmd_congruence(const std::string& action, const std::string& name, const RunConfiguration& cfg) {
    SubgroupSpec spec;
    try {
        spec = subgroup_spec(name);
    } catch (const UnknownSubgroup& e) {
        std::cerr << e.what() << "\n";
        return IoOrParse;
    }
    const CosetTable t = coset_enumeration(spec, cfg.coset_cap);
    const bool structured = cfg.format == OutputFormat::Structured;
    nlohmann::json j{{"subgroup", spec.name}};
    std::ostringstream s;
    if (action == "cosets") {
        j["index"] = t.index();
        j["psl_index"] = t.psl_count;
        nlohmann::json reps = nlohmann::json::array();
        s << "subgroup: " << spec.name << "\nindex: " << t.index() << "\npsl_index: " << t.psl_count
          << "\nrepresentatives:\n";
        for (std::size_t i = 0; i < t.index(); ++i) {
            s << "  " << t.words[i] << "  " << t.representatives[i].str() << "\n";
            reps.push_back({{"word", t.words[i]}, {"matrix", t.representatives[i].str()}});
        }
        j["representatives"] = reps;
    } else if (action == "cusps") {
        const auto [e2, e3] = elliptic_counts(t, spec);
        j["cusps"] = cusp_count(t, spec);
        j["elliptic_order_2"] = e2;
        j["elliptic_order_3"] = e3;
        s << "subgroup: " << spec.name << "\ncusps: " << cusp_count(t, spec) << "\nelliptic points: " << e2
          << " of order 2, " << e3 << " of order 3\n";
    } else if (action == "genus") {
        const SurfaceType st = surface_classification(t, spec);
        j["genus"] = st.genus;
        j["cusps"] = st.cusp_count;
        j["cone_points"] = st.cone_points;
        j["surface"] = st.underlying_name;
        j["psl_index"] = st.psl_index;
        j["orbifold_euler_characteristic"] = st.orbifold_euler_characteristic().str();
        s << "subgroup: " << spec.name << "\ngenus: " << st.genus << "\ncusps: " << st.cusp_count
          << "\ncone points:";
        for (int c : st.cone_points) s << " " << c;
        s << (st.cone_points.empty() ? " none" : "") << "\nsurface: " << st.underlying_name
          << "\norbifold euler characteristic: " << st.orbifold_euler_characteristic().str() << "\n";
    } else {
        const FundamentalDomain fd = fundamental_domain(t, spec);
        const std::string svg = render_svg(fd, spec.name);
        if (cfg.out_dir.empty()) {
            std::cout << svg;
        } else {
            fs::create_directories(cfg.out_dir);
            const fs::path p = cfg.out_dir / ("domain_" + name + ".svg");
            std::ofstream out(p, std::ios::binary);
            if (!out) throw ParseError("cannot write " + p.string());
            out << svg;
            std::cerr << "wrote " << p.string() << " (" << fd.tiles.size() << " tiles, " << fd.edge_pairings.size()
                      << " pairings)\n";
        }
        return Ok;
    }
    emit(structured ? j.dump(2) + "\n" : s.str(), cfg, "congruence_" + action + "_" + name);
    return Ok;
}

int cmd_verify(const RunConfiguration& cfg) {
    const auto files = corpus_files(cfg.corpus);
    std::optional<NormalizerCache> cache;
    if (!cfg.out_dir.empty()) cache.emplace(cfg.out_dir);
    std::vector<ComputedModuli> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            try {
                results[i] = compute_moduli(files[i].path, cfg, cache ? &*cache : nullptr);
            } catch (const NotClosed& e) {
                results[i].error = std::string("NotClosed: ") + e.what();
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
    std::vector<std::future<void>> jobs;
    for (unsigned k = 0; k < n; ++k) jobs.push_back(std::async(std::launch::async, worker));
    for (auto& j : jobs) j.get();
    std::map<std::string, ComputedModuli> computed;
    for (std::size_t i = 0; i < files.size(); ++i) computed[files[i].name] = results[i];
    const auto rows = verify_against_reference(computed);
    emit(format_verification(rows, cfg.format), cfg, "verify-paper");
    const bool ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) {
        return r.reference_match == "PASS" || r.reference_match == "BRACKETED";
    });
    return ok ? Ok : Verification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flatmod: exact computations on flat manifolds and their moduli of flat metrics"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfiguration cfg;
    cfg.corpus = FLATMOD_DEFAULT_CORPUS;
    std::string corpus = cfg.corpus.string(), out, format = "text";
    app.add_option("--bound", cfg.bound, "entry bound for normalizer candidates")->capture_default_str();
    app.add_option("--word-bound", cfg.word_bound, "word length bound for the involution analysis")
        ->capture_default_str();
    app.add_option("--corpus", corpus, "corpus directory")->capture_default_str();
    app.add_option("--out", out, "output directory for reports, caches and SVG files");
    app.add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));

    std::vector<std::string> names;
    bool all = false;
    auto* validate = app.add_subcommand("validate", "check holonomy, lattice and torsion-freeness");
    validate->add_option("group", names, "group name or corpus file");
    validate->add_flag("--all", all, "every corpus file");

    auto* moduli = app.add_subcommand("moduli", "Teichmuller space, normalizer and moduli space of a group");
    moduli->add_option("group", names, "group name or corpus file");
    moduli->add_flag("--all", all, "every corpus file");

    std::string action, subgroup;
    auto* congruence = app.add_subcommand("congruence", "coset, cusp, genus and fundamental-domain data");
    congruence->add_option("action", action)->required()->check(CLI::IsMember({"cosets", "cusps", "genus", "domain"}));
    congruence->add_option("subgroup", subgroup)->required();

    auto* verify = app.add_subcommand("verify-paper", "cross-check the reference moduli table over the corpus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : IoOrParse;
    }

    try {
        cfg.corpus = corpus;
        cfg.out_dir = out;
        cfg.format = parse_format(format);
        cfg.check();
        if (*validate) return cmd_validate(targets(names, all, cfg.corpus));
        if (*moduli) return cmd_moduli(targets(names, all, cfg.corpus), cfg);
        if (*congruence) return cmd_congruence(action, subgroup, cfg);
        if (*verify) return cmd_verify(cfg);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return IoOrParse;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return IoOrParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return IoOrParse;
    }
    return Ok;
}
