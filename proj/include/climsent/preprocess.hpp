#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "climsent/corpus.hpp"
#include "climsent/porter.hpp"
#include "climsent/stopwords.hpp"

namespace climsent {

struct PreprocessConfig {
    bool remove_urls = true;
    bool strip_sigils = true;  // leading @ / # on mentions and hashtags
    bool remove_stopwords = true;
    bool apply_stemming = false;
};

struct TokenSequence {
    std::string doc_id;
    std::vector<std::string> tokens;

    friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

using Stoplist = std::unordered_set<std::string>;

inline Stoplist default_stoplist() {
    Stoplist s;
    for (auto w : kEnglishStopwords) s.emplace(w);
    return s;
}

/// One word per line; blank lines are skipped and entries are lowercased.
inline Stoplist load_stoplist(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    Stoplist s;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        auto word = detail::trim(std::string_view(text).substr(start, end - start));
        if (!word.empty()) s.insert(detail::ascii_lower(word));
        start = end + 1;
    }
    return s;
}

namespace detail {

inline bool is_ascii_alnum(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline bool starts_with_nocase(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (s.size() - pos < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != prefix[i]) return false;
    }
    return true;
}

inline std::string remove_urls(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const bool boundary = i == 0 || !is_ascii_alnum(text[i - 1]);
        if (boundary && (starts_with_nocase(text, i, "http://") || starts_with_nocase(text, i, "https://") ||
                         starts_with_nocase(text, i, "www."))) {
            while (i < text.size() && !is_ascii_space(text[i])) ++i;
            out += ' ';
            continue;
        }
        out += text[i++];
    }
    return out;
}

inline std::string strip_sigils(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool word_start = out.empty() || is_ascii_space(out.back());
        if ((c == '@' || c == '#') && word_start && i + 1 < text.size() && !is_ascii_space(text[i + 1])) {
            continue;
        }
        out += c;
    }
    return out;
}

/// Decodes one UTF-8 code point at `pos`, advancing it. Malformed input
/// consumes a single byte and yields U+FFFD.
inline char32_t next_code_point(std::string_view s, std::size_t& pos) {
    const auto lead = static_cast<unsigned char>(s[pos]);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) { len = 2; cp = lead & 0x1F; }
    else if ((lead & 0xF0) == 0xE0) { len = 3; cp = lead & 0x0F; }
    else if ((lead & 0xF8) == 0xF0) { len = 4; cp = lead & 0x07; }
    else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + len > s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[pos + k]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
}

/// Lowercase mapping restricted to the code points whose lowercase form is
/// ASCII; every other non-ASCII code point is discarded downstream anyway.
inline char32_t to_lower(char32_t cp) noexcept {
    if (cp >= U'A' && cp <= U'Z') return cp - U'A' + U'a';
    if (cp == 0x212A) return U'k';  // KELVIN SIGN
    if (cp == 0x0130) return U'i';  // LATIN CAPITAL LETTER I WITH DOT ABOVE
    return cp;
}

}  // namespace detail

/// URL removal, sigil stripping, lowercasing, replacement of everything
/// outside [a-z ] by a space, then whitespace collapse. Output matches
/// `([a-z]+( [a-z]+)*)?`.
inline std::string normalize(std::string_view text, const PreprocessConfig& config = {}) {
    std::string work(text);
    if (config.remove_urls) work = detail::remove_urls(work);
    if (config.strip_sigils) work = detail::strip_sigils(work);

    std::string out;
    out.reserve(work.size());
    bool pending_space = false;
    std::size_t pos = 0;
    while (pos < work.size()) {
        const char32_t cp = detail::to_lower(detail::next_code_point(work, pos));
        if (cp >= U'a' && cp <= U'z') {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += static_cast<char>(cp);
        } else {
            pending_space = true;
        }
    }
    return out;
}

/// Splits on spaces, dropping empty pieces.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ') ++j;
        if (j > i) tokens.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return tokens;
}

inline std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const Stoplist& stoplist) {
    std::erase_if(tokens, [&](const std::string& t) { return stoplist.count(t) > 0; });
    return tokens;
}

/// Stems every token. The lone token "s" stems to nothing and is dropped.
inline std::vector<std::string> stem(std::vector<std::string> tokens) {
    for (auto& t : tokens) t = porter_stem(t);
    std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
    return tokens;
}

/// normalize -> tokenize -> stopword removal -> stemming. Stopwords are
/// removed before stemming.
inline TokenSequence preprocess(const Document& doc, const PreprocessConfig& config, const Stoplist& stoplist) {
    TokenSequence seq;
    seq.doc_id = doc.id;
    seq.tokens = tokenize(normalize(doc.text, config));
    if (config.remove_stopwords) seq.tokens = remove_stopwords(std::move(seq.tokens), stoplist);
    if (config.apply_stemming) seq.tokens = stem(std::move(seq.tokens));
    return seq;
}

inline std::vector<TokenSequence> preprocess_corpus(const LabeledCorpus& corpus, const PreprocessConfig& config,
                                                    const Stoplist& stoplist) {
    std::vector<TokenSequence> out;
    out.reserve(corpus.size());
    for (const auto& doc : corpus) out.push_back(preprocess(doc, config, stoplist));
    return out;
}

}  // namespace climsent
