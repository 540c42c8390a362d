#include "shared_lasso/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "shared_lasso/error.hpp"
#include "shared_lasso/rng.hpp"

namespace shared_lasso {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool token_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\''; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::pair<std::string, int> parse_review_filename(std::string_view filename) {
  auto fail = [&] {
    return DataError("malformed review file name '" + std::string(filename) +
                     "' (expected <id>_<rating>.txt)");
  };
  constexpr std::string_view ext = ".txt";
  if (filename.size() <= ext.size() || filename.substr(filename.size() - ext.size()) != ext)
    throw fail();
  const auto stem = filename.substr(0, filename.size() - ext.size());
  const auto sep = stem.rfind('_');
  if (sep == std::string_view::npos) throw fail();
  const auto id = stem.substr(0, sep);
  const auto rating_text = stem.substr(sep + 1);
  if (!all_digits(id) || !all_digits(rating_text)) throw fail();
  int rating = 0;
  std::from_chars(rating_text.data(), rating_text.data() + rating_text.size(), rating);
  if (rating < 1 || rating > 10) throw fail();
  return {std::string(id), rating};
}

GenreTable read_genre_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read genre table " + path.string());
  GenreTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected a tab");
    const std::string key(trim(std::string_view(line).substr(0, tab)));
    auto& genres = table[key];
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto genre = trim(rest.substr(0, comma));
      if (!genre.empty()) genres.insert(lower(genre));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return table;
}

std::vector<Review> ingest(const fs::path& root, const GenreTable* genres) {
  std::vector<Review> reviews;
  for (const char* split : {"train", "test"}) {
    for (const char* polarity : {"pos", "neg"}) {
      const fs::path dir = root / split / polarity;
      if (!fs::is_directory(dir)) throw DataError("missing corpus directory " + dir.string());
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        Review r;
        std::tie(r.id, r.rating) = parse_review_filename(name);
        r.source = std::string(split) + "/" + polarity;
        r.text = read_file(entry.path());
        if (genres) {
          auto it = genres->find(r.key());
          if (it == genres->end()) it = genres->find(r.id);
          if (it != genres->end()) r.genres = it->second;
        }
        reviews.push_back(std::move(r));
      }
    }
  }
  std::sort(reviews.begin(), reviews.end(),
            [](const Review& a, const Review& b) { return a.key() < b.key(); });
  return reviews;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    if (c == '<' && i + 2 < text.size() &&
        std::tolower(static_cast<unsigned char>(text[i + 1])) == 'b' &&
        std::tolower(static_cast<unsigned char>(text[i + 2])) == 'r') {
      const auto close = text.find('>', i);
      const auto between = text.substr(i + 3, close == std::string_view::npos ? 0 : close - i - 3);
      if (close != std::string_view::npos &&
          std::all_of(between.begin(), between.end(),
                      [](char b) { return b == ' ' || b == '/'; })) {
        flush();
        i = close;
        continue;
      }
    }
    if (token_char(c)) {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Vocabulary build_vocab(std::span<const Review> training, std::size_t min_doc_freq) {
  if (min_doc_freq < 1) throw ConfigError("min_doc_freq must be at least 1");
  std::map<std::string, std::size_t> df;
  for (const auto& r : training) {
    auto tokens = tokenize(r.text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[std::move(t)];
  }
  Vocabulary v;
  v.min_doc_freq = min_doc_freq;
  for (const auto& [token, count] : df) {
    if (count < min_doc_freq) continue;
    v.ids.emplace(token, static_cast<Index>(v.tokens.size()));
    v.tokens.push_back(token);
    v.doc_freq.push_back(count);
  }
  return v;
}

Featurized featurize(std::span<const Review> reviews, const Vocabulary& vocab) {
  std::vector<std::vector<Index>> rows;
  rows.reserve(reviews.size());
  Featurized out;
  for (const auto& r : reviews) {
    std::vector<Index> row;
    for (const auto& t : tokenize(r.text)) {
      auto it = vocab.ids.find(t);
      if (it != vocab.ids.end()) row.push_back(it->second);
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    rows.push_back(std::move(row));
    out.y.push_back(static_cast<double>(r.rating));
  }
  out.X = SparseBinaryDesign::from_rows(rows, vocab.size());
  return out;
}

CorpusSplit group_and_split(std::span<const Review> reviews, std::span<const std::string> priority,
                            std::uint64_t seed, std::size_t min_doc_freq) {
  std::vector<std::string> names;
  for (const auto& g : priority) names.push_back(lower(g));
  const bool ungrouped = names.empty();
  if (ungrouped) names.push_back("all");

  std::vector<std::size_t> kept;
  std::vector<std::uint32_t> label(reviews.size(), 0);
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    if (ungrouped) {
      kept.push_back(i);
      continue;
    }
    for (std::uint32_t g = 0; g < names.size(); ++g) {
      if (reviews[i].genres.count(names[g])) {
        label[i] = g;
        kept.push_back(i);
        break;
      }
    }
  }

  std::vector<std::size_t> order = kept;
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = order.size() - order.size() / 2;
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  std::vector<std::size_t> train_sizes(names.size(), 0);
  for (std::size_t i : train_idx) ++train_sizes[label[i]];
  for (std::size_t g = 0; g < names.size(); ++g)
    if (train_sizes[g] == 0)
      throw ConfigError("group '" + names[g] + "' is empty after filtering and splitting");

  auto collect = [&](std::span<const std::size_t> idx) {
    std::vector<Review> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(reviews[i]);
    return out;
  };
  const auto train_reviews = collect(train_idx);
  const auto test_reviews = collect(test_idx);

  CorpusSplit split;
  split.vocab = build_vocab(train_reviews, min_doc_freq);
  auto assemble = [&](std::span<const std::size_t> idx, std::span<const Review> rs,
                      GroupedDataset& ds, std::vector<std::string>& keys) {
    auto f = featurize(rs, split.vocab);
    ds.X = std::move(f.X);
    ds.y = std::move(f.y);
    ds.group_names = names;
    for (std::size_t i : idx) {
      ds.groups.push_back(label[i]);
      keys.push_back(reviews[i].key());
    }
  };
  assemble(train_idx, train_reviews, split.train, split.train_keys);
  assemble(test_idx, test_reviews, split.test, split.test_keys);
  return split;
}

}  // namespace shared_lasso
