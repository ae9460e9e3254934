#include "corpusfit/corpus.hpp"

#include <fstream>

#include "corpusfit/errors.hpp"
#include "corpusfit/unicode.hpp"

namespace corpusfit {

std::int64_t Corpus::total_tokens() const {
    std::int64_t total = 0;
    for (const auto& doc : documents) total += doc.length();
    return total;
}

StopwordSet::StopwordSet(std::vector<std::string> words)
    : words_(words.begin(), words.end()) {}

StopwordSet StopwordSet::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open stopword file: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        words.push_back(line);
    }
    return StopwordSet(std::move(words));
}

Document tokenize(std::string_view raw_line, const TokenizerOptions& opts) {
    // Decode (validating) and lowercase up front.
    std::vector<char32_t> cps;
    cps.reserve(raw_line.size());
    std::size_t i = 0;
    while (i < raw_line.size()) {
        char32_t cp;
        if (!utf8_next(raw_line, i, cp)) throw data_error("invalid UTF-8");
        cps.push_back(opts.lowercase ? lower_cp(cp) : cp);
    }

    Document doc;
    std::string cur;
    bool cur_is_punct = false;
    auto flush = [&] {
        if (!cur.empty()) {
            doc.tokens.push_back(cur);
            cur.clear();
        }
    };
    for (char32_t cp : cps) {
        if (is_space_cp(cp)) {
            flush();
            continue;
        }
        const bool punct = !opts.pretokenized && is_punct_cp(cp);
        if (!cur.empty() && punct != cur_is_punct && !opts.pretokenized) flush();
        cur_is_punct = punct;
        append_utf8(cur, cp);
    }
    flush();
    return doc;
}

Corpus load_corpus(const std::string& path, const IngestOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open corpus file: " + path);
    Corpus corpus;
    corpus.source_label = path;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        Document doc;
        try {
            doc = tokenize(line, opts.tokenizer);
        } catch (const data_error&) {
            throw data_error(path + ": line " + std::to_string(line_no) +
                             ": invalid UTF-8");
        }
        if (doc.tokens.empty() && !opts.keep_empty) continue;
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

bool is_symbol_token(std::string_view token) {
    if (token.empty()) return false;
    std::size_t i = 0;
    while (i < token.size()) {
        char32_t cp;
        if (!utf8_next(token, i, cp)) return false;
        if (!is_punct_cp(cp) && !is_digit_cp(cp)) return false;
    }
    return true;
}

TokenClass classify_token(std::string_view token, const StopwordSet& stopwords) {
    if (is_symbol_token(token)) return TokenClass::symbol;
    if (stopwords.contains(token)) return TokenClass::stopword;
    return TokenClass::other;
}

Vocabulary vocabulary(const Corpus& corpus) {
    Vocabulary vocab;
    for (const auto& doc : corpus.documents) {
        for (const auto& tok : doc.tokens) ++vocab.entries[tok];
        vocab.total_tokens += doc.length();
    }
    return vocab;
}

const char* to_string(TokenClass cls) {
    switch (cls) {
        case TokenClass::symbol: return "symbol";
        case TokenClass::stopword: return "stopword";
        default: return "other";
    }
}

} // namespace corpusfit
