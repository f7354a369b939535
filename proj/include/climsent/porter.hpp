#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace climsent {

namespace detail {

/// Porter (1980) suffix stripper over a lowercase ASCII word. Rules follow
/// the original published algorithm: within a step the longest matching
/// suffix is selected, and if its condition fails the step does nothing.
class PorterStemmer {
public:
    explicit PorterStemmer(std::string_view word) : w_(word) {}

    std::string run() {
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        return w_;
    }

private:
    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    bool is_consonant(std::size_t i) const {
        switch (w_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 || !is_consonant(i - 1);
            default: return true;
        }
    }

    /// Number of VC sequences in w_[0, len).
    std::size_t measure(std::size_t len) const {
        std::size_t m = 0;
        std::size_t i = 0;
        while (i < len && is_consonant(i)) ++i;
        while (i < len) {
            while (i < len && !is_consonant(i)) ++i;
            if (i >= len) break;
            while (i < len && is_consonant(i)) ++i;
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i) {
            if (!is_consonant(i)) return true;
        }
        return false;
    }

    /// *d: w_[0, len) ends with a double consonant.
    bool double_consonant(std::size_t len) const {
        return len >= 2 && w_[len - 1] == w_[len - 2] && is_consonant(len - 1);
    }

    /// *o: w_[0, len) ends cvc, the final c not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3) return false;
        if (!is_consonant(len - 1) || is_consonant(len - 2) || !is_consonant(len - 3)) return false;
        const char c = w_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends_with(std::string_view suffix) const {
        return w_.size() >= suffix.size() &&
               std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
    }

    void replace_suffix(std::size_t suffix_len, std::string_view replacement) {
        w_.resize(w_.size() - suffix_len);
        w_ += replacement;
    }

    template <std::size_t N>
    const Rule* longest_match(const std::array<Rule, N>& rules) const {
        const Rule* best = nullptr;
        for (const auto& r : rules) {
            if (ends_with(r.suffix) && (!best || r.suffix.size() > best->suffix.size())) best = &r;
        }
        return best;
    }

    void step1a() {
        if (ends_with("sses")) replace_suffix(4, "ss");
        else if (ends_with("ies")) replace_suffix(3, "i");
        else if (ends_with("ss")) return;
        else if (ends_with("s")) replace_suffix(1, "");
    }

    void step1b() {
        if (ends_with("eed")) {
            if (measure(w_.size() - 3) > 0) replace_suffix(3, "ee");
            return;
        }
        bool stripped = false;
        if (ends_with("ed") && has_vowel(w_.size() - 2)) {
            replace_suffix(2, "");
            stripped = true;
        } else if (ends_with("ing") && has_vowel(w_.size() - 3)) {
            replace_suffix(3, "");
            stripped = true;
        }
        if (!stripped) return;

        if (ends_with("at")) replace_suffix(2, "ate");
        else if (ends_with("bl")) replace_suffix(2, "ble");
        else if (ends_with("iz")) replace_suffix(2, "ize");
        else if (double_consonant(w_.size())) {
            const char last = w_.back();
            if (last != 'l' && last != 's' && last != 'z') w_.pop_back();
        } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
            w_ += 'e';
        }
    }

    void step1c() {
        if (ends_with("y") && has_vowel(w_.size() - 1)) w_.back() = 'i';
    }

    void step2() {
        static constexpr std::array<Rule, 20> rules = {{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},    {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
        }};
        apply_if_measure_above(rules, 0);
    }

    void step3() {
        static constexpr std::array<Rule, 7> rules = {{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        }};
        apply_if_measure_above(rules, 0);
    }

    void step4() {
        static constexpr std::array<Rule, 19> rules = {{
            {"al", ""},  {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},   {"able", ""},
            {"ible", ""}, {"ant", ""}, {"ement", ""}, {"ment", ""}, {"ent", ""}, {"ion", ""},
            {"ou", ""},  {"ism", ""},  {"ate", ""},  {"iti", ""}, {"ous", ""},  {"ive", ""},
            {"ize", ""},
        }};
        const Rule* r = longest_match(rules);
        if (!r) return;
        const std::size_t stem_len = w_.size() - r->suffix.size();
        if (measure(stem_len) <= 1) return;
        if (r->suffix == "ion" && (stem_len == 0 || (w_[stem_len - 1] != 's' && w_[stem_len - 1] != 't'))) {
            return;
        }
        replace_suffix(r->suffix.size(), "");
    }

    void step5a() {
        if (!ends_with("e")) return;
        const std::size_t stem_len = w_.size() - 1;
        const std::size_t m = measure(stem_len);
        if (m > 1 || (m == 1 && !cvc(stem_len))) w_.pop_back();
    }

    void step5b() {
        if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
    }

    template <std::size_t N>
    void apply_if_measure_above(const std::array<Rule, N>& rules, std::size_t min_measure) {
        const Rule* r = longest_match(rules);
        if (!r) return;
        if (measure(w_.size() - r->suffix.size()) > min_measure) replace_suffix(r->suffix.size(), r->replacement);
    }

    std::string w_;
};

}  // namespace detail

/// Porter stem of a lowercase alphabetic word.
inline std::string porter_stem(std::string_view word) {
    if (word.empty()) return {};
    return detail::PorterStemmer(word).run();
}

}  // namespace climsent
