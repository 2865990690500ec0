#include "phishlex/url_features.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace phishlex::features {

namespace {

constexpr const char* kSchemaVersion = "lex21-v1";

bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

// Non-overlapping substring count.
std::size_t count_substr(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0, pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::size_t count_char(const std::string& s, char c) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), c));
}

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_octet(const std::string& group) {
  if (group.size() >= 2 && group[0] == '0' && (group[1] == 'x' || group[1] == 'X')) {
    const std::string digits = group.substr(2);
    if (digits.empty() || digits.size() > 2) return false;
    return std::all_of(digits.begin(), digits.end(), [](unsigned char c) {
      return std::isxdigit(c) != 0;
    });
  }
  if (group.empty() || group.size() > 3) return false;
  if (!std::all_of(group.begin(), group.end(),
                   [](unsigned char c) { return std::isdigit(c) != 0; })) {
    return false;
  }
  return std::stoi(group) <= 255;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open word list: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

const FeatureSchema& FeatureSchema::canonical() {
  static const FeatureSchema schema{
      kSchemaVersion,
      {"use_of_ip",    "abnormal_url",   "google_index",  "count_dot",
       "count_www",    "count_at",       "count_dir",     "count_embed",
       "short_url",    "count_https",    "count_http",    "count_percent",
       "count_question", "count_hyphen", "count_equal",   "url_length",
       "hostname_length", "sus_url",     "fd_length",     "count_digits",
       "count_letters"},
      {FeatureKind::kBinary, FeatureKind::kBinary, FeatureKind::kBinary,
       FeatureKind::kCount,  FeatureKind::kCount,  FeatureKind::kCount,
       FeatureKind::kCount,  FeatureKind::kCount,  FeatureKind::kBinary,
       FeatureKind::kCount,  FeatureKind::kCount,  FeatureKind::kCount,
       FeatureKind::kCount,  FeatureKind::kCount,  FeatureKind::kCount,
       FeatureKind::kLength, FeatureKind::kLength, FeatureKind::kBinary,
       FeatureKind::kLength, FeatureKind::kCount,  FeatureKind::kCount}};
  return schema;
}

std::size_t FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw InvalidArgumentError("unknown feature name: " + name);
}

const WordLists& WordLists::bundled() {
  static const WordLists lists{
      {"paypal", "login", "signin", "bank", "account", "update", "free", "lucky",
       "service", "bonus", "ebayisapi", "webscr"},
      {"bit.ly", "goo.gl", "tinyurl.com", "t.co", "ow.ly", "is.gd", "buff.ly",
       "adf.ly", "bit.do", "cutt.ly"}};
  return lists;
}

WordLists WordLists::load(const std::string& keywords_path,
                          const std::string& shorteners_path) {
  WordLists lists = bundled();
  if (!keywords_path.empty()) lists.suspicious_keywords = read_lines(keywords_path);
  if (!shorteners_path.empty()) lists.shorteners = read_lines(shorteners_path);
  return lists;
}

ParsedUrl parse_url(const std::string& raw) {
  const auto first = raw.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw EmptyUrlError("URL is empty");
  const auto last = raw.find_last_not_of(" \t\r\n");
  const std::string trimmed = raw.substr(first, last - first + 1);

  ParsedUrl url;
  url.raw = trimmed;

  // Scheme: text before the first "://" when it precedes any other
  // delimiter and uses only scheme characters.
  std::size_t rest = 0;
  const std::size_t sep = trimmed.find("://");
  if (sep != std::string::npos && sep > 0) {
    const std::string candidate = trimmed.substr(0, sep);
    const std::size_t other = trimmed.find_first_of("/?");
    if (other >= sep &&
        std::all_of(candidate.begin(), candidate.end(), is_scheme_char)) {
      url.scheme = candidate;
      rest = sep + 3;
    }
  }

  // Authority: up to the first '/' or '?'.
  const std::size_t auth_end = trimmed.find_first_of("/?", rest);
  std::string authority = trimmed.substr(rest, auth_end == std::string::npos
                                                   ? std::string::npos
                                                   : auth_end - rest);

  // Userinfo stays out of the hostname: the host is what follows the last
  // '@' of the authority.
  const std::size_t at = authority.rfind('@');
  url.hostname = at == std::string::npos ? authority : authority.substr(at + 1);

  if (auth_end != std::string::npos) {
    std::size_t path_start = auth_end;
    if (trimmed[auth_end] == '/') {
      url.has_path = true;
      path_start = auth_end + 1;
    }
    const std::size_t q = trimmed.find('?', auth_end);
    if (trimmed[auth_end] == '?') {
      url.query = trimmed.substr(auth_end + 1);
    } else {
      url.path = trimmed.substr(path_start, q == std::string::npos
                                                ? std::string::npos
                                                : q - path_start);
      if (q != std::string::npos) url.query = trimmed.substr(q + 1);
    }
  }

  const std::size_t dir_end = url.path.find('/');
  url.first_dir =
      dir_end == std::string::npos ? url.path : url.path.substr(0, dir_end);
  return url;
}

bool hostname_is_ip(const std::string& hostname) {
  if (hostname.empty()) return false;
  std::vector<std::string> groups;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = hostname.find('.', start);
    groups.push_back(hostname.substr(start, dot == std::string::npos
                                                ? std::string::npos
                                                : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (groups.size() != 4) return false;
  return std::all_of(groups.begin(), groups.end(), parse_octet);
}

FeatureVector extract_features(const std::string& raw, const IndexLookupProvider& idx,
                               const WordLists& lists) {
  const ParsedUrl url = parse_url(raw);
  const std::string& r = url.raw;
  const std::string path = url.path_component();

  FeatureVector fv;
  fv.schema_version = FeatureSchema::canonical().schema_version;
  auto set = [&fv](std::size_t i, double v) { fv.values[i] = v; };

  set(0, hostname_is_ip(url.hostname) ? 1.0 : 0.0);
  set(1, (!url.hostname.empty() && r.find(url.hostname) == std::string::npos) ? 1.0
                                                                              : 0.0);
  set(2, idx.is_indexed(url.hostname) ? 1.0 : 0.0);
  set(3, static_cast<double>(count_char(r, '.')));
  set(4, static_cast<double>(count_substr(r, "www")));
  set(5, static_cast<double>(count_char(r, '@')));
  set(6, static_cast<double>(count_char(path, '/')));
  set(7, static_cast<double>(count_substr(path, "//")));

  bool shortened = false;
  for (const std::string& dom : lists.shorteners) {
    if (url.hostname == dom ||
        (url.hostname.size() > dom.size() &&
         url.hostname.compare(url.hostname.size() - dom.size() - 1, dom.size() + 1,
                              "." + dom) == 0)) {
      shortened = true;
      break;
    }
  }
  set(8, shortened ? 1.0 : 0.0);

  set(9, static_cast<double>(count_substr(r, "https")));
  set(10, static_cast<double>(count_substr(r, "http")));
  set(11, static_cast<double>(count_char(r, '%')));
  set(12, static_cast<double>(count_char(r, '?')));
  set(13, static_cast<double>(count_char(r, '-')));
  set(14, static_cast<double>(count_char(r, '=')));
  set(15, static_cast<double>(r.size()));
  set(16, static_cast<double>(url.hostname.size()));

  const std::string lower = to_lower(r);
  bool suspicious = false;
  for (const std::string& word : lists.suspicious_keywords) {
    if (lower.find(to_lower(word)) != std::string::npos) {
      suspicious = true;
      break;
    }
  }
  set(17, suspicious ? 1.0 : 0.0);

  set(18, static_cast<double>(url.first_dir.size()));
  set(19, static_cast<double>(std::count_if(r.begin(), r.end(), [](unsigned char c) {
           return std::isdigit(c) != 0;
         })));
  set(20, static_cast<double>(std::count_if(r.begin(), r.end(), [](unsigned char c) {
           return std::isalpha(c) != 0;
         })));
  return fv;
}

BatchResult featurize_batch(const std::vector<RawUrlRecord>& records,
                            const IndexLookupProvider& idx, const WordLists& lists) {
  BatchResult result;
  result.matrix.schema_version = FeatureSchema::canonical().schema_version;
  result.matrix.values.reserve(records.size() * kFeatureCount);
  result.matrix.labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      const FeatureVector fv = extract_features(records[i].url, idx, lists);
      result.matrix.values.insert(result.matrix.values.end(), fv.values.begin(),
                                  fv.values.end());
      result.matrix.labels.push_back(records[i].label);
    } catch (const Error& e) {
      result.errors.push_back({i, e.what()});
    }
  }
  if (result.matrix.labels.empty()) {
    throw BatchEmptyError("no rows could be featurized");
  }
  return result;
}

}  // namespace phishlex::features
