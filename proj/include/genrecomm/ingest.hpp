#pragma once

// Loading and joining of review and album tables.
//
// reviews.jsonl : {"user_id", "album_id", "score", "text"?, "date"?} per line
// reviews.csv   : header user_id,album_id,score,text,date
// albums.csv    : header album_id,band_id,title,year,country,genres
//                 (genres ';'-separated)

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "genrecomm/text_util.hpp"

namespace genrecomm {

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReviewRecord {
  std::string user_id;
  std::string album_id;
  int score = 0;
  std::optional<std::string> text;
  std::optional<std::string> date;

  friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

struct AlbumRecord {
  std::string album_id;
  std::string band_id;
  std::string title;
  std::vector<std::string> genres;  // display names, in file order
  std::optional<std::string> country;
  std::optional<int> year;

  friend bool operator==(const AlbumRecord&, const AlbumRecord&) = default;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct LoadResult {
  T records;
  std::vector<RowError> errors;
};

enum class ReviewFormat { jsonl, csv };

struct CorpusSummary {
  std::size_t users = 0;
  std::size_t albums = 0;
  std::size_t genres = 0;
  std::size_t reviews = 0;
  std::size_t orphan_reviews = 0;

  friend bool operator==(const CorpusSummary&, const CorpusSummary&) = default;
};

/// Joined, immutable view of the input data. Every review's album_id
/// resolves in `albums`.
struct Corpus {
  std::vector<ReviewRecord> reviews;
  std::map<std::string, AlbumRecord> albums;
  std::size_t orphan_reviews = 0;

  const AlbumRecord* album(const std::string& id) const {
    auto it = albums.find(id);
    return it == albums.end() ? nullptr : &it->second;
  }

  CorpusSummary summary() const {
    CorpusSummary s;
    std::set<std::string> users, genres;
    for (const auto& r : reviews) users.insert(r.user_id);
    for (const auto& [id, a] : albums)
      for (const auto& g : a.genres) genres.insert(genre_key(g));
    s.users = users.size();
    s.albums = albums.size();
    s.genres = genres.size();
    s.reviews = reviews.size();
    s.orphan_reviews = orphan_reviews;
    return s;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

namespace detail {

inline bool valid_iso_date(std::string_view d) {
  // YYYY-MM-DD, optionally followed by a time part starting with 'T' or ' '.
  if (d.size() < 10) return false;
  auto digits = [&](std::size_t b, std::size_t n) {
    for (std::size_t i = b; i < b + n; ++i)
      if (d[i] < '0' || d[i] > '9') return false;
    return true;
  };
  if (!digits(0, 4) || d[4] != '-' || !digits(5, 2) || d[7] != '-' || !digits(8, 2)) return false;
  int month = (d[5] - '0') * 10 + (d[6] - '0');
  int day = (d[8] - '0') * 10 + (d[9] - '0');
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  return d.size() == 10 || d[10] == 'T' || d[10] == ' ';
}

inline std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  return in;
}

/// Validates a parsed review; returns an error message or empty string.
inline std::string check_review(const ReviewRecord& r) {
  if (r.user_id.empty()) return "empty user_id";
  if (r.album_id.empty()) return "empty album_id";
  if (r.score < 0 || r.score > 100) return "score " + std::to_string(r.score) + " outside [0,100]";
  if (r.date && !valid_iso_date(*r.date)) return "date '" + *r.date + "' is not ISO-8601";
  return {};
}

inline std::optional<std::string> optional_field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace detail

inline LoadResult<std::vector<ReviewRecord>> load_reviews_jsonl(std::istream& in) {
  LoadResult<std::vector<ReviewRecord>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fail = [&](std::string msg) { out.errors.push_back({lineno, std::move(msg)}); };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(std::string("malformed JSON: ") + e.what());
      continue;
    }
    if (!j.is_object()) {
      fail("row is not a JSON object");
      continue;
    }
    ReviewRecord r;
    auto str = [&](const char* key, std::string& dst) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_string()) return false;
      dst = it->get<std::string>();
      return true;
    };
    if (!str("user_id", r.user_id)) {
      fail("missing or non-string user_id");
      continue;
    }
    if (!str("album_id", r.album_id)) {
      fail("missing or non-string album_id");
      continue;
    }
    auto sc = j.find("score");
    if (sc == j.end() || !sc->is_number_integer()) {
      fail("missing or non-integer score");
      continue;
    }
    auto score = sc->get<long long>();
    if (score < 0 || score > 100) {
      fail("score " + std::to_string(score) + " outside [0,100]");
      continue;
    }
    r.score = static_cast<int>(score);
    bool bad_optional = false;
    for (const char* key : {"text", "date"}) {
      auto it = j.find(key);
      if (it == j.end() || it->is_null()) continue;
      if (!it->is_string()) {
        fail(std::string("non-string ") + key);
        bad_optional = true;
        break;
      }
      (std::string_view(key) == "text" ? r.text : r.date) = it->get<std::string>();
    }
    if (bad_optional) continue;
    if (auto msg = detail::check_review(r); !msg.empty()) {
      fail(std::move(msg));
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

inline LoadResult<std::vector<ReviewRecord>> load_reviews_csv(std::istream& in) {
  LoadResult<std::vector<ReviewRecord>> out;
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f)) return out;
  const std::vector<std::string> header{"user_id", "album_id", "score", "text", "date"};
  if (f != header) throw IngestError("reviews.csv: header must be user_id,album_id,score,text,date");
  while (reader.next(f)) {
    if (f.size() == 1 && trim(f[0]).empty()) continue;
    if (f.size() != header.size()) {
      out.errors.push_back({reader.line(), "expected 5 fields, got " + std::to_string(f.size())});
      continue;
    }
    ReviewRecord r{f[0], f[1], 0, detail::optional_field(f[3]), detail::optional_field(f[4])};
    auto score = parse_int<int>(trim(f[2]));
    if (!score) {
      out.errors.push_back({reader.line(), "non-integer score '" + f[2] + "'"});
      continue;
    }
    r.score = *score;
    if (auto msg = detail::check_review(r); !msg.empty()) {
      out.errors.push_back({reader.line(), std::move(msg)});
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

/// Loads reviews in the declared format. Row-level problems are collected;
/// an unreadable file throws IngestError.
inline LoadResult<std::vector<ReviewRecord>> load_reviews(const std::filesystem::path& path,
                                                          ReviewFormat format) {
  auto in = detail::open_or_throw(path);
  return format == ReviewFormat::jsonl ? load_reviews_jsonl(in) : load_reviews_csv(in);
}

/// Parses the ';'-separated genre field. Names are whitespace-normalized;
/// duplicates (by genre_key) keep the first spelling.
inline std::vector<std::string> parse_genre_list(std::string_view field) {
  std::vector<std::string> genres;
  std::set<std::string> seen;
  for (const auto& part : split(field, ';')) {
    auto name = collapse_whitespace(part);
    if (name.empty()) continue;
    if (seen.insert(genre_key(name)).second) genres.push_back(std::move(name));
  }
  return genres;
}

inline LoadResult<std::map<std::string, AlbumRecord>> load_albums(std::istream& in) {
  LoadResult<std::map<std::string, AlbumRecord>> out;
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f)) return out;
  const std::vector<std::string> header{"album_id", "band_id", "title", "year", "country", "genres"};
  if (f != header)
    throw IngestError("albums.csv: header must be album_id,band_id,title,year,country,genres");
  std::map<std::string, std::size_t> first_line;
  while (reader.next(f)) {
    if (f.size() == 1 && trim(f[0]).empty()) continue;
    auto line = reader.line();
    if (f.size() != header.size()) {
      out.errors.push_back({line, "expected 6 fields, got " + std::to_string(f.size())});
      continue;
    }
    AlbumRecord a;
    a.album_id = f[0];
    a.band_id = f[1];
    a.title = f[2];
    if (a.album_id.empty()) {
      out.errors.push_back({line, "empty album_id"});
      continue;
    }
    if (auto y = trim(f[3]); !y.empty()) {
      auto year = parse_int<int>(y);
      if (!year) {
        out.errors.push_back({line, "non-integer year '" + f[3] + "'"});
        continue;
      }
      a.year = *year;
    }
    if (auto c = collapse_whitespace(f[4]); !c.empty()) a.country = c;
    a.genres = parse_genre_list(f[5]);
    if (a.genres.empty()) {
      out.errors.push_back({line, "album " + a.album_id + " has an empty genre list"});
      continue;
    }
    auto [it, inserted] = out.records.emplace(a.album_id, a);
    if (inserted) {
      first_line[a.album_id] = line;
      continue;
    }
    auto keys = [](const AlbumRecord& r) {
      std::set<std::string> k;
      for (const auto& g : r.genres) k.insert(genre_key(g));
      return k;
    };
    const auto& prev = it->second;
    bool same = keys(prev) == keys(a) && prev.band_id == a.band_id && prev.title == a.title &&
                prev.year == a.year && prev.country == a.country;
    if (!same)
      throw IngestError("album " + a.album_id + " defined twice with conflicting fields (lines " +
                        std::to_string(first_line[a.album_id]) + " and " + std::to_string(line) +
                        ")");
  }
  return out;
}

inline LoadResult<std::map<std::string, AlbumRecord>> load_albums(
    const std::filesystem::path& path) {
  auto in = detail::open_or_throw(path);
  return load_albums(in);
}

/// Joins reviews to albums. Orphan reviews are dropped and counted; more
/// than half orphaned means the files do not belong together.
///
/// Genre spellings are unified across albums: every genre takes the display
/// form of its first occurrence (albums visited in album_id order).
inline Corpus join_corpus(std::vector<ReviewRecord> reviews,
                          std::map<std::string, AlbumRecord> albums) {
  std::map<std::string, std::string> display;
  for (auto& [id, a] : albums)
    for (auto& g : a.genres) g = display.try_emplace(genre_key(g), g).first->second;

  Corpus c;
  c.albums = std::move(albums);
  c.reviews.reserve(reviews.size());
  for (auto& r : reviews) {
    if (c.albums.count(r.album_id))
      c.reviews.push_back(std::move(r));
    else
      ++c.orphan_reviews;
  }
  if (c.orphan_reviews * 2 > reviews.size())
    throw IngestError(std::to_string(c.orphan_reviews) + " of " + std::to_string(reviews.size()) +
                      " reviews reference unknown albums; review and album files look mismatched");
  return c;
}

// Serialization back to the input formats.

inline void write_reviews_jsonl(std::ostream& os, const std::vector<ReviewRecord>& reviews) {
  for (const auto& r : reviews) {
    nlohmann::ordered_json j;
    j["user_id"] = r.user_id;
    j["album_id"] = r.album_id;
    j["score"] = r.score;
    if (r.text) j["text"] = *r.text;
    if (r.date) j["date"] = *r.date;
    os << j.dump() << '\n';
  }
}

inline void write_albums_csv(std::ostream& os, const std::map<std::string, AlbumRecord>& albums) {
  os << "album_id,band_id,title,year,country,genres\n";
  for (const auto& [id, a] : albums) {
    std::string genres;
    for (std::size_t i = 0; i < a.genres.size(); ++i) genres += (i ? ";" : "") + a.genres[i];
    os << csv_row({a.album_id, a.band_id, a.title, a.year ? std::to_string(*a.year) : "",
                   a.country.value_or(""), genres});
  }
}

}  // namespace genrecomm
