#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <string>
#include <unordered_map>
#include <vector>

#include "rplc/common.hpp"
#include "rplc/types.hpp"

namespace rplc::lang {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Lowercase, collapse whitespace runs, strip punctuation from both ends.
inline std::string normalize_text(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    bool in_space = true;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!in_space) s.push_back(' ');
            in_space = true;
        } else {
            s.push_back(static_cast<char>(std::tolower(c)));
            in_space = false;
        }
    }
    std::size_t b = 0, e = s.size();
    while (e > 0 && (std::ispunct(static_cast<unsigned char>(s[e - 1])) || s[e - 1] == ' ')) --e;
    while (b < e && (std::ispunct(static_cast<unsigned char>(s[b])) || s[b] == ' ')) ++b;
    return s.substr(b, e - b);
}

struct CategorySpec {
    std::string name;
    std::vector<std::string> synonyms;   // includes the name itself
    std::vector<std::string> templates;  // each contains exactly one "{}"

    void validate() const {
        if (synonyms.empty()) throw InvalidInput("CategorySpec: needs at least one synonym");
        if (templates.empty()) throw InvalidInput("CategorySpec: needs at least one template");
        for (const auto& t : templates) {
            auto first = t.find("{}");
            if (first == std::string::npos || t.find("{}", first + 1) != std::string::npos)
                throw InvalidInput("CategorySpec: template must contain exactly one {} slot");
        }
    }
};

inline std::vector<std::string> default_templates() { return {"a photo of a {}", "{}"}; }

inline CategorySpec make_category(const std::string& name) {
    return CategorySpec{name, {name}, default_templates()};
}

/// Text embedding provider. file_table serves precomputed vectors;
/// synthetic_hash derives a deterministic unit vector from the text itself
/// (mean of seeded per-token vectors, so related texts correlate).
class EmbeddingProvider {
public:
    enum class Kind { file_table, synthetic_hash };

    static EmbeddingProvider synthetic(int dim, std::uint64_t seed) {
        EmbeddingProvider p;
        p.kind_ = Kind::synthetic_hash;
        p.dim_ = dim;
        p.seed_ = seed;
        if (dim < 2) throw InvalidConfig("EmbeddingProvider: dim must be >= 2");
        return p;
    }

    static EmbeddingProvider from_table(std::unordered_map<std::string, VectorXd> table, int dim) {
        EmbeddingProvider p;
        p.kind_ = Kind::file_table;
        p.dim_ = dim;
        if (dim < 2) throw InvalidConfig("EmbeddingProvider: dim must be >= 2");
        for (auto& [k, v] : table) {
            if (v.size() != dim) throw InvalidConfig("EmbeddingProvider: table row dim mismatch");
            double n = v.norm();
            if (n < 1e-12) throw InvalidConfig("EmbeddingProvider: zero-norm table row");
            v /= n;
        }
        p.table_ = std::move(table);
        return p;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }

    VectorXd embed_text(const std::string& text) const {
        if (text.empty()) throw InvalidInput("embed_text: empty text");
        const std::string norm = normalize_text(text);
        if (norm.empty()) throw InvalidInput("embed_text: text empty after normalization");
        if (kind_ == Kind::file_table) {
            auto it = table_.find(norm);
            if (it == table_.end()) throw NotFound("embed_text: no table entry for \"" + norm + "\"");
            return it->second;
        }
        VectorXd sum = VectorXd::Zero(dim_);
        std::size_t start = 0;
        int tokens = 0;
        while (start <= norm.size()) {
            std::size_t end = norm.find(' ', start);
            if (end == std::string::npos) end = norm.size();
            if (end > start) {
                sum += token_vector(norm.substr(start, end - start));
                ++tokens;
            }
            start = end + 1;
        }
        if (tokens == 0) throw InvalidInput("embed_text: no tokens");
        double n = sum.norm();
        if (n < 1e-12) return token_vector(norm);  // pathological cancellation
        return sum / n;
    }

private:
    VectorXd token_vector(const std::string& token) const {
        Rng rng(hash_combine(seed_, fnv1a64(token)));
        VectorXd v(dim_);
        for (int i = 0; i < dim_; ++i) v[i] = rng.gaussian();
        return v / v.norm();
    }

    Kind kind_ = Kind::synthetic_hash;
    int dim_ = 16;
    std::uint64_t seed_ = 0;
    std::unordered_map<std::string, VectorXd> table_;
};

/// Prompt-ensemble category embedding: mean over template x synonym texts,
/// re-normalized.
inline VectorXd embed_category(const EmbeddingProvider& provider, const CategorySpec& spec) {
    spec.validate();
    VectorXd sum = VectorXd::Zero(provider.dim());
    int count = 0;
    for (const auto& tmpl : spec.templates) {
        for (const auto& syn : spec.synonyms) {
            std::string text = tmpl;
            text.replace(text.find("{}"), 2, syn);
            sum += provider.embed_text(text);
            ++count;
        }
    }
    VectorXd mean = sum / count;
    double n = mean.norm();
    if (n < 1e-9) throw DegenerateMean("embed_category: zero-norm prompt mean for " + spec.name);
    return mean / n;
}

/// Per-scene deduplicated caption embeddings plus each pair's target column.
struct CaptionBank {
    std::vector<std::string> texts;  // unique normalized captions, first-occurrence order
    MatrixXd embeddings;             // n_t x d, unit rows
    std::vector<int> target_index;   // one per input pair

    int n_t() const { return static_cast<int>(texts.size()); }
};

inline CaptionBank build_caption_bank(const std::vector<RegionLanguagePair>& pairs,
                                      const EmbeddingProvider& provider) {
    if (pairs.empty()) throw InvalidInput("build_caption_bank: no pairs");
    for (const auto& p : pairs)
        if (p.scene_id != pairs.front().scene_id)
            throw InvalidInput("build_caption_bank: pairs from different scenes");

    CaptionBank bank;
    std::unordered_map<std::string, int> index;
    for (const auto& p : pairs) {
        std::string norm = normalize_text(p.caption);
        auto [it, inserted] = index.try_emplace(norm, static_cast<int>(bank.texts.size()));
        if (inserted) bank.texts.push_back(norm);
        bank.target_index.push_back(it->second);
    }
    bank.embeddings.resize(bank.n_t(), provider.dim());
    for (int i = 0; i < bank.n_t(); ++i) bank.embeddings.row(i) = provider.embed_text(bank.texts[i]);
    return bank;
}

}  // namespace rplc::lang
