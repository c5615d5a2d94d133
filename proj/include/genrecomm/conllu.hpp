#pragma once

// CoNLL-U reader for parsed reviews. Each review starts with a
// "# review_id = <user_id>|<album_id>" comment; the sentences that follow
// belong to it. Comments of the form "# key = value" before the first
// review are kept as file metadata (e.g. parser_model, parser_version).

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "genrecomm/text_util.hpp"

namespace genrecomm {

class ConlluError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Token {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::string feats;
  int head = 0;
  std::string deprel;
  std::string deps;
  std::string misc;

  /// Relation without its language-specific subtype ("nsubj:pass" -> "nsubj").
  std::string base_deprel() const { return deprel.substr(0, deprel.find(':')); }
};

struct Sentence {
  std::vector<Token> tokens;
};

struct ParsedDocument {
  std::string user_id;
  std::string album_id;
  std::vector<Sentence> sentences;
};

struct ConlluFile {
  std::map<std::string, std::string> metadata;
  std::vector<ParsedDocument> documents;
};

/// Problems that make a sentence unusable; empty when well formed.
inline std::vector<std::string> validate(const Sentence& s) {
  std::vector<std::string> errs;
  int roots = 0;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const auto& t = s.tokens[i];
    if (t.id != static_cast<int>(i) + 1)
      errs.push_back("token " + std::to_string(i + 1) + " has ID " + std::to_string(t.id));
    if (t.head < 0 || t.head > static_cast<int>(s.tokens.size()))
      errs.push_back("token " + std::to_string(t.id) + " has invalid HEAD " + std::to_string(t.head));
    if (t.head == t.id) errs.push_back("token " + std::to_string(t.id) + " is its own head");
    if (t.head == 0) ++roots;
  }
  if (!s.tokens.empty() && roots != 1)
    errs.push_back("sentence has " + std::to_string(roots) + " roots");
  return errs;
}

inline ConlluFile read_conllu(std::istream& in) {
  ConlluFile file;
  Sentence current;
  ParsedDocument* doc = nullptr;
  std::size_t lineno = 0;
  std::size_t sentence_start = 0;

  auto fail = [&](const std::string& msg) {
    throw ConlluError("CoNLL-U line " + std::to_string(lineno) + ": " + msg);
  };
  auto flush = [&] {
    if (current.tokens.empty()) return;
    if (!doc) fail("sentence outside any review_id block");
    if (auto errs = validate(current); !errs.empty())
      throw ConlluError("CoNLL-U sentence at line " + std::to_string(sentence_start) + ": " +
                        errs.front());
    doc->sentences.push_back(std::move(current));
    current = {};
  };

  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      auto body = trim(std::string_view(line).substr(1));
      auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      auto key = trim(std::string_view(body).substr(0, eq));
      auto value = trim(std::string_view(body).substr(eq + 1));
      if (key == "review_id") {
        flush();
        auto bar = value.find('|');
        if (bar == std::string::npos) fail("review_id must be <user_id>|<album_id>");
        file.documents.push_back({value.substr(0, bar), value.substr(bar + 1), {}});
        doc = &file.documents.back();
      } else if (!doc) {
        file.metadata[key] = value;
      }
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 10) fail("expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    // multiword token ranges and empty nodes are not part of the basic tree
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    auto id = parse_int<int>(cols[0]);
    auto head = parse_int<int>(cols[6]);
    if (!id) fail("non-integer ID '" + cols[0] + "'");
    if (!head) fail("non-integer HEAD '" + cols[6] + "'");
    if (current.tokens.empty()) sentence_start = lineno;
    current.tokens.push_back({*id, cols[1], cols[2], cols[3], cols[4], cols[5], *head, cols[7],
                              cols[8], cols[9]});
  }
  flush();
  return file;
}

}  // namespace genrecomm
