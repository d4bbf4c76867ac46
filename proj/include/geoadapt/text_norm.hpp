#pragma once

#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace geoadapt::text {

// Canonical string folding used for every name comparison in the library:
// trim, lowercase ASCII, collapse internal whitespace runs to one space and
// transliterate common Latin diacritics to ASCII. Idempotent. Bytes outside
// the known ranges pass through untouched.
std::string fold(std::string_view raw);

// fold() plus an optional alias table (e.g. "usa" -> "united states").
// Alias chains are resolved at load time so normalize() stays idempotent.
class NameNormalizer {
public:
    NameNormalizer() = default;

    // One alias per line: "alias<TAB>canonical". '#' starts a comment.
    void load_alias_file(const std::string& path);
    void add_alias(std::string_view alias, std::string_view canonical);

    std::string normalize(std::string_view raw) const;

    // The explicit "could not be determined" marker; empty names fold to it.
    static bool is_unknown(std::string_view normalized) {
        return normalized.empty() || normalized == "unknown";
    }

    bool names_match(std::string_view a, std::string_view b) const;

private:
    std::unordered_map<std::string, std::string> aliases_;
};

// Deduplicated set of normalized entity strings. Iteration order is sorted,
// which keeps every serialization of a set deterministic.
class EntitySet {
public:
    EntitySet() = default;
    explicit EntitySet(const std::vector<std::string>& raw_entities);

    void insert(std::string_view raw);
    bool contains(std::string_view raw) const;
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    const std::set<std::string>& items() const { return items_; }

    static double jaccard(const EntitySet& a, const EntitySet& b);

private:
    std::set<std::string> items_;
};

// Rule-based entity extraction: maximal spans of capitalized tokens, plus
// matches against an optional gazetteer of known names. Sentence-leading
// stopwords ("The", "A", ...) do not open a span on their own.
class EntityExtractor {
public:
    EntityExtractor() = default;

    void add_gazetteer_entry(std::string_view name);

    EntitySet extract(std::string_view text) const;

private:
    std::set<std::string> gazetteer_;
};

}  // namespace geoadapt::text
