#include "rebuttal/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "rebuttal/errors.hpp"

namespace rebuttal {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
}  // namespace

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), is_space);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_space(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::string normalize_for_match(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(u));
    } else {
      pending_space = true;
    }
  }
  return out;
}

bool normalized_contains(std::string_view haystack, std::string_view needle) {
  const auto n = normalize_for_match(needle);
  if (n.empty()) return false;
  return normalize_for_match(haystack).find(n) != std::string::npos;
}

std::vector<std::string> split_paragraphs(std::string_view body) {
  std::vector<std::string> paragraphs;
  std::string current;
  auto flush = [&] {
    auto t = trim(current);
    if (!t.empty()) paragraphs.emplace_back(t);
    current.clear();
  };
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto nl = body.find('\n', pos);
    if (nl == std::string_view::npos) nl = body.size();
    auto line = body.substr(pos, nl - pos);
    if (is_blank(line)) {
      flush();
    } else {
      if (!current.empty()) current += '\n';
      current += line;
    }
    pos = nl + 1;
  }
  flush();
  return paragraphs;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string render_template(
    std::string_view tmpl,
    const std::vector<std::pair<std::string, std::string>>& slots) {
  std::string out;
  std::set<std::string> used;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::kPrecondition, "unterminated template slot");
    }
    out += tmpl.substr(pos, open - pos);
    const std::string name(tmpl.substr(open + 2, close - open - 2));
    const auto it = std::find_if(slots.begin(), slots.end(),
                                 [&](const auto& kv) { return kv.first == name; });
    if (it == slots.end()) {
      throw Error(ErrorKind::kPrecondition, "template slot not provided: " + name);
    }
    out += it->second;
    used.insert(name);
    pos = close + 2;
  }
  for (const auto& [name, _] : slots) {
    if (!used.count(name)) {
      throw Error(ErrorKind::kPrecondition, "template has no slot named " + name);
    }
  }
  return out;
}

std::string prompt_section(std::string_view prompt, std::string_view name) {
  const std::string header = std::string(name) + ":\n<<<\n";
  auto start = prompt.find(header);
  while (start != std::string_view::npos && start > 0 && prompt[start - 1] != '\n') {
    start = prompt.find(header, start + 1);
  }
  if (start == std::string_view::npos) return {};
  const auto body = start + header.size();
  const auto end = prompt.find("\n>>>", body);
  if (end == std::string_view::npos) return std::string(prompt.substr(body));
  return std::string(prompt.substr(body, end - body));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kPrecondition, "cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kPrecondition, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorKind::kPrecondition, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rebuttal
