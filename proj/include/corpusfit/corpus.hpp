#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace corpusfit {

struct Document {
    std::vector<std::string> tokens;

    std::int64_t length() const { return static_cast<std::int64_t>(tokens.size()); }
};

struct Corpus {
    std::vector<Document> documents;
    std::string source_label;

    std::int64_t size() const { return static_cast<std::int64_t>(documents.size()); }
    std::int64_t total_tokens() const;
};

struct Vocabulary {
    std::map<std::string, std::int64_t> entries; // token -> occurrence count (>= 1)
    std::int64_t total_tokens = 0;
};

// Checked in this order: symbol wins over stopword, so the two classes are
// disjoint by construction.
enum class TokenClass { symbol, stopword, other };

class StopwordSet {
public:
    StopwordSet() = default;
    explicit StopwordSet(std::vector<std::string> words);

    // The bundled English list (identical to NLTK's `english`, 179 entries).
    static const StopwordSet& english();
    // One token per line; blank lines and '#'-prefixed comments ignored.
    static StopwordSet from_file(const std::string& path);

    bool contains(std::string_view token) const {
        return words_.find(std::string(token)) != words_.end();
    }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

struct TokenizerOptions {
    bool lowercase = true;
    bool pretokenized = false; // split on whitespace only, no punctuation splitting
};

struct IngestOptions {
    TokenizerOptions tokenizer;
    bool keep_empty = false; // empty lines become empty documents instead of being dropped
};

// Lowercases, splits each maximal punctuation run off adjacent alphanumerics,
// then splits on whitespace. Idempotent on its own output. Throws data_error
// on invalid UTF-8.
Document tokenize(std::string_view raw_line, const TokenizerOptions& opts = {});

// One document per input line, in file order. Throws data_error on a missing
// file or an undecodable line (message carries the 1-based line number).
Corpus load_corpus(const std::string& path, const IngestOptions& opts = {});

TokenClass classify_token(std::string_view token, const StopwordSet& stopwords);

// True iff every code point is Unicode punctuation (P*) or a decimal digit (Nd).
bool is_symbol_token(std::string_view token);

Vocabulary vocabulary(const Corpus& corpus);

const char* to_string(TokenClass cls);

} // namespace corpusfit
