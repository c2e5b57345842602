#include "iepinn/container.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "iepinn/errors.hpp"

namespace iepinn {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// Shortest decimal that round-trips a double exactly.
void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

bool TextContainer::has_block(const std::string& name) const {
  for (const auto& [n, m] : blocks)
    if (n == name) return true;
  return false;
}

const Eigen::MatrixXd& TextContainer::block(const std::string& name) const {
  for (const auto& [n, m] : blocks)
    if (n == name) return m;
  throw ValidationError("missing block [" + name + "]");
}

double TextContainer::header_double(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end()) throw ValidationError("missing header key '" + key + "'");
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("malformed header value for '" + key + "': " + it->second);
  }
}

std::int64_t TextContainer::header_int(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end()) throw ValidationError("missing header key '" + key + "'");
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("malformed header value for '" + key + "': " + it->second);
  }
}

void TextContainer::set(const std::string& key, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  header[key] = buf;
}

void TextContainer::set(const std::string& key, std::int64_t value) {
  header[key] = std::to_string(value);
}

void TextContainer::set(const std::string& key, const std::string& value) {
  header[key] = value;
}

void TextContainer::add_block(const std::string& name, const Eigen::MatrixXd& data) {
  blocks.emplace_back(name, data);
}

void TextContainer::write(const std::string& path) const {
  std::string out;
  out.reserve(64 + blocks.size() * 1024);
  out += magic;
  out += '\n';
  for (const auto& [k, v] : header) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  for (const auto& [name, m] : blocks) {
    out += '[';
    out += name;
    out += ' ';
    out += std::to_string(m.rows());
    out += ' ';
    out += std::to_string(m.cols());
    out += "]\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out += ' ';
        append_number(out, m(i, j));
      }
      out += '\n';
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open for writing: " + path);
  f << out;
  if (!f) throw std::runtime_error("write failed: " + path);
}

TextContainer TextContainer::read(const std::string& path,
                                  const std::string& expected_magic) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open: " + path);

  TextContainer c;
  std::string line;
  if (!std::getline(f, line)) throw ValidationError("empty file: " + path);
  c.magic = trim(line);
  if (c.magic != expected_magic)
    throw ValidationError(path + ": malformed header, expected '" +
                          expected_magic + "' got '" + c.magic + "'");

  // Header section: key = value lines until the first block marker.
  std::string pending_block;
  while (std::getline(f, line)) {
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      pending_block = s;
      break;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ": malformed header line: " + s);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ValidationError(path + ": empty header key");
    if (c.header.count(key)) throw ValidationError(path + ": duplicate key " + key);
    c.header[key] = value;
  }

  while (!pending_block.empty()) {
    if (pending_block.back() != ']')
      throw ValidationError(path + ": malformed block marker: " + pending_block);
    std::istringstream hdr(pending_block.substr(1, pending_block.size() - 2));
    std::string name;
    Eigen::Index rows = -1, cols = -1;
    hdr >> name >> rows >> cols;
    if (name.empty() || rows < 0 || cols < 0 || !hdr)
      throw ValidationError(path + ": malformed block marker: " + pending_block);

    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(f >> m(i, j)))
          throw ValidationError(path + ": truncated block [" + name + "]");

    c.blocks.emplace_back(name, std::move(m));

    pending_block.clear();
    while (std::getline(f, line)) {
      const std::string s = trim(line);
      if (s.empty()) continue;
      if (s.front() != '[')
        throw ValidationError(path + ": unexpected content after block: " + s);
      pending_block = s;
      break;
    }
  }
  return c;
}

}  // namespace iepinn
