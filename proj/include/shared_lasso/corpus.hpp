#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "shared_lasso/dsl.hpp"
#include "shared_lasso/sparse.hpp"

namespace shared_lasso {

/// Bumped whenever tokenization rules change; recorded in run manifests.
inline constexpr std::string_view kTokenizerVersion = "lower-alnum-apos/1";

struct Review {
  std::string id;      // numeric id from the file name
  std::string source;  // "train/pos", "test/neg", ...
  int rating = 0;
  std::string text;
  std::set<std::string> genres;

  /// Corpus-unique key "<source>/<id>", e.g. "train/pos/123".
  std::string key() const { return source + "/" + id; }
};

/// Parses "<id>_<rating>.txt". Throws DataError naming the file otherwise.
std::pair<std::string, int> parse_review_filename(std::string_view filename);

/// Genre sidecar: review key -> genres. Lines are "review_id<TAB>g1,g2,...".
using GenreTable = std::unordered_map<std::string, std::set<std::string>>;
GenreTable read_genre_table(const std::filesystem::path& path);

/// Reads train/{pos,neg} and test/{pos,neg} under root, sorted by key.
/// Genres are looked up by key first, then by bare id.
std::vector<Review> ingest(const std::filesystem::path& root, const GenreTable* genres = nullptr);

/// Lowercases, strips <br /> tags and splits on anything outside [a-z0-9'].
std::vector<std::string> tokenize(std::string_view text);

struct Vocabulary {
  std::vector<std::string> tokens;            // id -> token, lexicographic
  std::vector<std::size_t> doc_freq;          // training document frequency
  std::unordered_map<std::string, Index> ids;  // token -> id
  std::size_t min_doc_freq = 5;

  std::size_t size() const { return tokens.size(); }
};

Vocabulary build_vocab(std::span<const Review> training, std::size_t min_doc_freq = 5);

struct Featurized {
  SparseBinaryDesign X;
  std::vector<double> y;
};

Featurized featurize(std::span<const Review> reviews, const Vocabulary& vocab);

struct CorpusSplit {
  GroupedDataset train;
  GroupedDataset test;
  std::vector<std::string> train_keys;
  std::vector<std::string> test_keys;
  Vocabulary vocab;
};

/// Keeps reviews tagged with at least one genre of interest, assigns each to
/// the first matching genre in `priority`, splits 50/50 at random and builds
/// the vocabulary from the training half only. An empty priority list puts
/// every review into one group named "all".
CorpusSplit group_and_split(std::span<const Review> reviews,
                            std::span<const std::string> priority, std::uint64_t seed,
                            std::size_t min_doc_freq = 5);

}  // namespace shared_lasso
