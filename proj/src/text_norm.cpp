#include "geoadapt/text_norm.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "geoadapt/errors.hpp"

namespace geoadapt::text {

namespace {

// Latin-1 / Latin Extended-A diacritic folding for the UTF-8 sequences that
// show up in place names. Anything not listed passes through unchanged.
struct Fold {
    const char* from;
    const char* to;
};

constexpr std::array<Fold, 60> kFolds{{
    {"à", "a"}, {"á", "a"}, {"â", "a"}, {"ã", "a"},
    {"ä", "a"}, {"å", "a"}, {"æ", "ae"}, {"ç", "c"},
    {"è", "e"}, {"é", "e"}, {"ê", "e"}, {"ë", "e"},
    {"ì", "i"}, {"í", "i"}, {"î", "i"}, {"ï", "i"},
    {"ð", "d"}, {"ñ", "n"}, {"ò", "o"}, {"ó", "o"},
    {"ô", "o"}, {"õ", "o"}, {"ö", "o"}, {"ø", "o"},
    {"ù", "u"}, {"ú", "u"}, {"û", "u"}, {"ü", "u"},
    {"ý", "y"}, {"ÿ", "y"}, {"þ", "th"}, {"ß", "ss"},
    {"ā", "a"}, {"ă", "a"}, {"ą", "a"}, {"ć", "c"},
    {"č", "c"}, {"ď", "d"}, {"đ", "d"}, {"ē", "e"},
    {"ė", "e"}, {"ę", "e"}, {"ě", "e"}, {"ğ", "g"},
    {"ı", "i"}, {"ł", "l"}, {"ń", "n"}, {"ň", "n"},
    {"ő", "o"}, {"œ", "oe"}, {"ř", "r"}, {"ś", "s"},
    {"ş", "s"}, {"š", "s"}, {"ţ", "t"}, {"ū", "u"},
    {"ů", "u"}, {"ű", "u"}, {"ź", "z"}, {"ž", "z"},
}};

// Uppercase diacritics are lowered first via this table.
constexpr std::array<Fold, 58> kUpperToLower{{
    {"À", "à"}, {"Á", "á"}, {"Â", "â"},
    {"Ã", "ã"}, {"Ä", "ä"}, {"Å", "å"},
    {"Æ", "æ"}, {"Ç", "ç"}, {"È", "è"},
    {"É", "é"}, {"Ê", "ê"}, {"Ë", "ë"},
    {"Ì", "ì"}, {"Í", "í"}, {"Î", "î"},
    {"Ï", "ï"}, {"Ð", "ð"}, {"Ñ", "ñ"},
    {"Ò", "ò"}, {"Ó", "ó"}, {"Ô", "ô"},
    {"Õ", "õ"}, {"Ö", "ö"}, {"Ø", "ø"},
    {"Ù", "ù"}, {"Ú", "ú"}, {"Û", "û"},
    {"Ü", "ü"}, {"Ý", "ý"}, {"Þ", "þ"},
    {"Ā", "ā"}, {"Ă", "ă"}, {"Ą", "ą"},
    {"Ć", "ć"}, {"Č", "č"}, {"Ď", "ď"},
    {"Đ", "đ"}, {"Ē", "ē"}, {"Ė", "ė"},
    {"Ę", "ę"}, {"Ě", "ě"}, {"Ğ", "ğ"},
    {"İ", "i"},      {"Ł", "ł"}, {"Ń", "ń"},
    {"Ň", "ň"}, {"Ő", "ő"}, {"Œ", "œ"},
    {"Ř", "ř"}, {"Ś", "ś"}, {"Ş", "ş"},
    {"Š", "š"}, {"Ţ", "ţ"}, {"Ū", "ū"},
    {"Ů", "ů"}, {"Ű", "ű"}, {"Ź", "ź"},
    {"Ž", "ž"},
}};

const char* lookup(const std::string_view s, std::size_t pos,
                   std::size_t* advance) {
    for (const auto& f : kUpperToLower) {
        const std::size_t n = std::char_traits<char>::length(f.from);
        if (s.compare(pos, n, f.from) == 0) {
            *advance = n;
            // lowered form folds in a second pass below
            for (const auto& g : kFolds) {
                if (std::string_view(f.to) == g.from) return g.to;
            }
            return f.to;
        }
    }
    for (const auto& f : kFolds) {
        const std::size_t n = std::char_traits<char>::length(f.from);
        if (s.compare(pos, n, f.from) == 0) {
            *advance = n;
            return f.to;
        }
    }
    return nullptr;
}

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

const std::set<std::string>& leading_stopwords() {
    static const std::set<std::string> kWords{
        "a",   "an",  "and", "as",  "at",  "but", "by",  "for", "from",
        "if",  "in",  "it",  "its", "of",  "on",  "or",  "our", "so",
        "the", "this", "these", "those", "to",  "was", "we",  "with"};
    return kWords;
}

}  // namespace

std::string fold(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < raw.size()) {
        const unsigned char c = static_cast<unsigned char>(raw[i]);
        if (c < 0x80) {
            if (is_space(c)) {
                pending_space = !out.empty();
                ++i;
                continue;
            }
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.push_back(static_cast<char>(std::tolower(c)));
            ++i;
            continue;
        }
        std::size_t advance = 0;
        if (const char* rep = lookup(raw, i, &advance)) {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.append(rep);
            i += advance;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(raw[i]);
        ++i;
    }
    return out;
}

void NameNormalizer::load_alias_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open alias file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (fold(line).empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'alias<TAB>canonical'");
        }
        add_alias(line.substr(0, tab), line.substr(tab + 1));
    }
}

void NameNormalizer::add_alias(std::string_view alias,
                               std::string_view canonical) {
    const std::string from = fold(alias);
    std::string to = fold(canonical);
    if (from.empty() || to.empty()) {
        throw ValidationError("alias entries must be non-empty");
    }
    // resolve chains so normalize() is a single lookup
    std::size_t hops = 0;
    for (auto it = aliases_.find(to); it != aliases_.end();
         it = aliases_.find(to)) {
        to = it->second;
        if (++hops > aliases_.size()) {
            throw ValidationError("alias cycle involving '" + from + "'");
        }
    }
    aliases_[from] = to;
    for (auto& [k, v] : aliases_) {
        if (v == from) v = to;
    }
}

std::string NameNormalizer::normalize(std::string_view raw) const {
    std::string folded = fold(raw);
    const auto it = aliases_.find(folded);
    return it == aliases_.end() ? folded : it->second;
}

bool NameNormalizer::names_match(std::string_view a, std::string_view b) const {
    const std::string na = normalize(a);
    const std::string nb = normalize(b);
    if (is_unknown(na) || is_unknown(nb)) return false;
    return na == nb;
}

EntitySet::EntitySet(const std::vector<std::string>& raw_entities) {
    for (const auto& e : raw_entities) insert(e);
}

void EntitySet::insert(std::string_view raw) {
    std::string n = fold(raw);
    if (!n.empty()) items_.insert(std::move(n));
}

bool EntitySet::contains(std::string_view raw) const {
    return items_.count(fold(raw)) > 0;
}

double EntitySet::jaccard(const EntitySet& a, const EntitySet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& e : a.items_) inter += b.items_.count(e);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

void EntityExtractor::add_gazetteer_entry(std::string_view name) {
    std::string n = fold(name);
    if (!n.empty()) gazetteer_.insert(std::move(n));
}

EntitySet EntityExtractor::extract(std::string_view text) const {
    EntitySet out;

    // tokenize on whitespace, keep sentence-boundary info
    struct Token {
        std::string word;     // stripped of surrounding punctuation
        bool capitalized = false;
        bool sentence_start = false;
        bool ends_sentence = false;
    };
    std::vector<Token> tokens;
    std::size_t i = 0;
    bool at_sentence_start = true;
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i])))
            ++i;
        if (i >= text.size()) break;
        std::size_t j = i;
        while (j < text.size() &&
               !is_space(static_cast<unsigned char>(text[j])))
            ++j;
        std::string_view rawtok = text.substr(i, j - i);
        std::size_t b = 0, e = rawtok.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(rawtok[b])))
            ++b;
        bool ends_sentence = false;
        while (e > b) {
            const unsigned char tail = static_cast<unsigned char>(rawtok[e - 1]);
            if (!std::ispunct(tail)) break;
            if (tail == '.' || tail == '!' || tail == '?') ends_sentence = true;
            --e;
        }
        if (e > b) {
            Token t;
            t.word = std::string(rawtok.substr(b, e - b));
            t.capitalized = std::isupper(static_cast<unsigned char>(t.word[0])) != 0;
            t.sentence_start = at_sentence_start;
            t.ends_sentence = ends_sentence;
            tokens.push_back(std::move(t));
            at_sentence_start = ends_sentence;
        } else if (ends_sentence) {
            at_sentence_start = true;
        }
        i = j;
    }

    // capitalized spans
    std::size_t k = 0;
    while (k < tokens.size()) {
        if (!tokens[k].capitalized) {
            ++k;
            continue;
        }
        std::size_t end = k;
        while (end + 1 < tokens.size() && tokens[end + 1].capitalized &&
               !tokens[end].ends_sentence)
            ++end;
        const bool lone_leading =
            end == k && tokens[k].sentence_start &&
            leading_stopwords().count(fold(tokens[k].word)) > 0;
        if (!lone_leading) {
            std::string span;
            std::size_t first = k;
            // a sentence-leading stopword does not open a multi-token span
            if (tokens[k].sentence_start &&
                leading_stopwords().count(fold(tokens[k].word)) > 0) {
                ++first;
            }
            for (std::size_t t = first; t <= end; ++t) {
                if (!span.empty()) span.push_back(' ');
                span += tokens[t].word;
            }
            if (!span.empty()) out.insert(span);
        }
        k = end + 1;
    }

    // gazetteer matches over folded token sequences
    if (!gazetteer_.empty()) {
        std::vector<std::string> folded;
        folded.reserve(tokens.size());
        for (const auto& t : tokens) folded.push_back(fold(t.word));
        for (std::size_t s = 0; s < folded.size(); ++s) {
            std::string phrase;
            for (std::size_t e2 = s; e2 < folded.size() && e2 < s + 6; ++e2) {
                if (!phrase.empty()) phrase.push_back(' ');
                phrase += folded[e2];
                if (gazetteer_.count(phrase)) out.insert(phrase);
                if (tokens[e2].ends_sentence) break;
            }
        }
    }
    return out;
}

}  // namespace geoadapt::text
