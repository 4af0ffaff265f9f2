#pragma once

#include "flatmod/moduli.hpp"
#include "flatmod/normalizer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace flatmod {

enum class OutputFormat { Text, Structured };
OutputFormat parse_format(const std::string& s);

struct RunConfiguration {
    std::filesystem::path corpus;
    int bound = 1;  // 0 is accepted and yields NotClosed
    int word_bound = 12;
    std::size_t coset_cap = 256;
    std::filesystem::path out_dir;  // empty: no cache, output to stdout
    OutputFormat format = OutputFormat::Text;

    void check() const;  // throws PreconditionViolated
};

// exact JSON round trip of a normalizer description
std::string serialize(const NormalizerDescription& nd);
NormalizerDescription deserialize_normalizer(const std::string& document);

std::string content_hash(const std::string& bytes);

// on-disk cache keyed by (group, bound), invalidated by the corpus file hash
class NormalizerCache {
public:
    explicit NormalizerCache(std::filesystem::path dir);
    std::optional<NormalizerDescription> get(const std::string& group, int bound, const std::string& hash) const;
    void put(const std::string& group, int bound, const std::string& hash, const NormalizerDescription& nd) const;
    std::filesystem::path entry_path(const std::string& group, int bound) const;

private:
    std::filesystem::path dir_;
};

std::string normalizer_summary(const NormalizerDescription& nd);

struct ManifoldReport {
    std::string name;
    std::string teichmuller;
    std::string normalizer_summary;
    std::string moduli_expression;
    std::string topological_form;
    std::string reference_match;  // PASS, FAIL, BRACKETED or ABSENT
    std::string note;
};

// full pipeline for one corpus file; the cache may be null
ManifoldReport moduli_report(const std::filesystem::path& file, const RunConfiguration& cfg,
                             const NormalizerCache* cache);
ComputedModuli compute_moduli(const std::filesystem::path& file, const RunConfiguration& cfg,
                              const NormalizerCache* cache, ManifoldReport* report = nullptr);

std::string format_report(const std::vector<ManifoldReport>& reports, OutputFormat f);
std::string format_verification(const std::vector<VerificationRow>& rows, OutputFormat f);

}  // namespace flatmod
