#include "tfec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "tfec/errors.hpp"

namespace tfec {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) parts.push_back(s.substr(start, i - start));
  }
  return parts;
}

bool parse_bool(std::string_view v, std::size_t line, std::string_view tag) {
  const auto l = lower(v);
  if (l == "true") return true;
  if (l == "false") return false;
  throw ParseError("@" + std::string(tag) + " expects true/false, got '" + std::string(v) + "'", line);
}

double parse_value(std::string_view tok, std::size_t line) {
  tok = trim(tok);
  if (tok == "?" || lower(tok) == "nan") {
    throw UnsupportedCorpus("line " + std::to_string(line) + ": missing values are not supported");
  }
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || tok.empty()) {
    throw ParseError("invalid numeric value '" + std::string(tok) + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(tok) + "'", line);
  return v;
}

struct Header {
  std::string problem_name;
  std::optional<bool> univariate;
  std::optional<std::size_t> dimensions;
  std::optional<std::size_t> series_length;
  bool class_label = false;
};

void apply_tag(Header& h, std::string_view line_text, std::size_t line) {
  const auto parts = split_ws(line_text.substr(1));
  if (parts.empty()) throw ParseError("empty header tag", line);
  const auto tag = lower(parts[0]);
  const auto need_value = [&](std::size_t n = 2) {
    if (parts.size() < n) throw ParseError("@" + std::string(parts[0]) + " is missing its value", line);
  };
  if (tag == "problemname") {
    need_value();
    h.problem_name = std::string(trim(line_text.substr(line_text.find(parts[1]))));
  } else if (tag == "timestamps") {
    need_value();
    if (parse_bool(parts[1], line, parts[0])) {
      throw UnsupportedCorpus("line " + std::to_string(line) + ": timestamped series are not supported");
    }
  } else if (tag == "missing") {
    need_value();
    parse_bool(parts[1], line, parts[0]);
  } else if (tag == "univariate") {
    need_value();
    h.univariate = parse_bool(parts[1], line, parts[0]);
  } else if (tag == "equallength") {
    need_value();
    if (!parse_bool(parts[1], line, parts[0])) {
      throw UnsupportedCorpus("line " + std::to_string(line) + ": variable-length corpora are not supported");
    }
  } else if (tag == "dimensions" || tag == "serieslength") {
    need_value();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), v);
    if (ec != std::errc() || ptr != parts[1].data() + parts[1].size() || v == 0) {
      throw ParseError("@" + std::string(parts[0]) + " expects a positive integer", line);
    }
    (tag == "dimensions" ? h.dimensions : h.series_length) = v;
  } else if (tag == "classlabel") {
    need_value();
    h.class_label = parse_bool(parts[1], line, parts[0]);
  } else if (tag == "targetlabel") {
    need_value();
    if (parse_bool(parts[1], line, parts[0])) {
      throw UnsupportedCorpus("line " + std::to_string(line) + ": regression targets are not supported");
    }
  } else {
    throw ParseError("unknown header tag '@" + std::string(parts[0]) + "'", line);
  }
}

}  // namespace

Series MTSDataset::series(std::size_t i) const {
  Series s;
  s.length = length;
  s.channels = channels;
  const auto src = series_span(i);
  s.values.assign(src.begin(), src.end());
  return s;
}

MTSDataset parse_ts(std::string_view text) {
  Header header;
  bool in_data = false;
  MTSDataset ds;
  std::vector<std::string> raw_labels;
  std::size_t line_no = 0;
  std::vector<double> buffer;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!in_data) {
      if (line.front() != '@') throw ParseError("data before @data tag", line_no);
      if (lower(trim(line.substr(1))) == "data") {
        in_data = true;
        continue;
      }
      apply_tag(header, line, line_no);
      continue;
    }
    if (line.front() == '@') throw ParseError("header tag after @data", line_no);

    auto fields = split(line, ':');
    if (header.class_label) {
      if (fields.size() < 2) throw ParseError("missing class label", line_no);
      raw_labels.emplace_back(trim(fields.back()));
      if (raw_labels.back().empty()) throw ParseError("empty class label", line_no);
      fields.pop_back();
    }
    const std::size_t f = fields.size();
    if (ds.size == 0) {
      ds.channels = f;
      if (header.dimensions && *header.dimensions != f) {
        throw ParseError("series has " + std::to_string(f) + " channels but @dimensions is " +
                             std::to_string(*header.dimensions),
                         line_no);
      }
    } else if (f != ds.channels) {
      throw ParseError("series has " + std::to_string(f) + " channels, expected " + std::to_string(ds.channels),
                       line_no);
    }

    std::vector<std::vector<double>> channel_values(f);
    for (std::size_t c = 0; c < f; ++c) {
      const auto field = trim(fields[c]);
      if (field.empty()) throw ParseError("empty channel " + std::to_string(c), line_no);
      for (auto tok : split(field, ',')) channel_values[c].push_back(parse_value(tok, line_no));
      if (channel_values[c].size() != channel_values[0].size()) {
        throw ParseError("ragged channel lengths within one series (channel " + std::to_string(c) + " has " +
                             std::to_string(channel_values[c].size()) + " values, channel 0 has " +
                             std::to_string(channel_values[0].size()) + ")",
                         line_no);
      }
    }
    const std::size_t t = channel_values[0].size();
    if (ds.size == 0) {
      ds.length = t;
    } else if (t != ds.length) {
      throw UnsupportedCorpus("line " + std::to_string(line_no) + ": series length " + std::to_string(t) +
                              " differs from " + std::to_string(ds.length) +
                              " (variable-length corpora are not supported)");
    }
    for (std::size_t ti = 0; ti < t; ++ti) {
      for (std::size_t c = 0; c < f; ++c) ds.samples.push_back(channel_values[c][ti]);
    }
    ++ds.size;
  }

  if (!in_data) throw ParseError("missing @data section", line_no);
  if (ds.size == 0) throw ParseError("corpus contains no series", line_no);
  if (header.series_length && *header.series_length != ds.length) {
    throw ParseError("@seriesLength " + std::to_string(*header.series_length) + " does not match data length " +
                         std::to_string(ds.length),
                     line_no);
  }

  ds.name = header.problem_name;
  if (header.class_label) {
    std::unordered_map<std::string, int> ids;
    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (const auto& l : raw_labels) {
      auto [it, inserted] = ids.emplace(l, static_cast<int>(ids.size()));
      if (inserted) ds.class_names.push_back(l);
      labels.push_back(it->second);
    }
    ds.labels = std::move(labels);
    ds.class_count = ids.size();
  }
  return ds;
}

MTSDataset load_ts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  MTSDataset ds;
  try {
    ds = parse_ts(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  } catch (const UnsupportedCorpus& e) {
    throw UnsupportedCorpus(path.string() + ": " + e.what());
  }
  if (ds.name.empty()) ds.name = path.stem().string();
  return ds;
}

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

MTSDataset load_corpus(const std::filesystem::path& path, bool merge_splits) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("file not found: " + path.string());

  if (fs::is_directory(path)) {
    std::vector<fs::path> train, test, other;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".ts") continue;
      const auto name = entry.path().filename().string();
      if (ends_with(name, "_TRAIN.ts")) {
        train.push_back(entry.path());
      } else if (ends_with(name, "_TEST.ts")) {
        test.push_back(entry.path());
      } else {
        other.push_back(entry.path());
      }
    }
    if (train.size() == 1) {
      auto ds = load_ts(train.front());
      if (merge_splits && test.size() == 1) ds = concat(ds, load_ts(test.front()));
      return ds;
    }
    if (train.empty() && test.empty() && other.size() == 1) return load_ts(other.front());
    throw IoError("cannot identify a single corpus in directory " + path.string());
  }

  auto ds = load_ts(path);
  const auto name = path.filename().string();
  if (merge_splits && ends_with(name, "_TRAIN.ts")) {
    auto sibling = path;
    sibling.replace_filename(name.substr(0, name.size() - 9) + "_TEST.ts");
    if (fs::exists(sibling)) ds = concat(ds, load_ts(sibling));
  }
  return ds;
}

MTSDataset concat(const MTSDataset& a, const MTSDataset& b) {
  if (a.length != b.length || a.channels != b.channels) {
    throw UnsupportedCorpus("cannot concatenate corpora of shape T=" + std::to_string(a.length) +
                            ",F=" + std::to_string(a.channels) + " and T=" + std::to_string(b.length) +
                            ",F=" + std::to_string(b.channels));
  }
  if (a.labels.has_value() != b.labels.has_value()) {
    throw UnsupportedCorpus("cannot concatenate a labelled and an unlabelled corpus");
  }
  MTSDataset out;
  out.name = a.name;
  out.size = a.size + b.size;
  out.length = a.length;
  out.channels = a.channels;
  out.samples = a.samples;
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  if (a.labels) {
    std::unordered_map<std::string, int> ids;
    std::vector<int> labels;
    for (const MTSDataset* part : {&a, &b}) {
      for (int l : *part->labels) {
        const auto& label_name = part->class_names.at(static_cast<std::size_t>(l));
        auto [it, inserted] = ids.emplace(label_name, static_cast<int>(ids.size()));
        if (inserted) out.class_names.push_back(label_name);
        labels.push_back(it->second);
      }
    }
    out.labels = std::move(labels);
    out.class_count = ids.size();
  }
  return out;
}

std::string to_ts(const MTSDataset& ds) {
  std::string out;
  out += "@problemName " + (ds.name.empty() ? std::string("unnamed") : ds.name) + "\n";
  out += "@timeStamps false\n@missing false\n";
  out += std::string("@univariate ") + (ds.channels == 1 ? "true" : "false") + "\n";
  out += "@dimensions " + std::to_string(ds.channels) + "\n";
  out += "@equalLength true\n";
  out += "@seriesLength " + std::to_string(ds.length) + "\n";
  if (ds.labels) {
    out += "@classLabel true";
    for (const auto& n : ds.class_names) out += " " + n;
    out += "\n";
  } else {
    out += "@classLabel false\n";
  }
  out += "@data\n";

  char buf[64];
  for (std::size_t i = 0; i < ds.size; ++i) {
    const auto s = ds.series_span(i);
    for (std::size_t c = 0; c < ds.channels; ++c) {
      if (c > 0) out += ':';
      for (std::size_t t = 0; t < ds.length; ++t) {
        if (t > 0) out += ',';
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s[t * ds.channels + c]);
        out.append(buf, ptr);
      }
    }
    if (ds.labels) {
      out += ':';
      out += ds.class_names.at(static_cast<std::size_t>((*ds.labels)[i]));
    }
    out += '\n';
  }
  return out;
}

MTSDataset znormalize(const MTSDataset& ds) {
  MTSDataset out = ds;
  const std::size_t t_len = ds.length;
  const std::size_t f = ds.channels;
  for (std::size_t i = 0; i < ds.size; ++i) {
    auto s = out.series_span(i);
    for (std::size_t c = 0; c < f; ++c) {
      double mean = 0.0;
      for (std::size_t t = 0; t < t_len; ++t) mean += s[t * f + c];
      mean /= static_cast<double>(t_len);
      double var = 0.0;
      for (std::size_t t = 0; t < t_len; ++t) {
        const double d = s[t * f + c] - mean;
        var += d * d;
      }
      const double sd = std::sqrt(var / static_cast<double>(t_len));
      for (std::size_t t = 0; t < t_len; ++t) {
        auto& v = s[t * f + c];
        v = sd < 1e-8 ? 0.0 : (v - mean) / sd;
      }
    }
  }
  return out;
}

DatasetStats stats(const MTSDataset& ds) {
  return {ds.name, ds.size, ds.length, ds.channels, ds.class_count.value_or(0)};
}

}  // namespace tfec
