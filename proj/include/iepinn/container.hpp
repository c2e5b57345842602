#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace iepinn {

// Self-describing text container shared by the .efd, .npk and .pfd files:
// a magic line, `key = value` header lines, then named numeric blocks
// `[name rows cols]` with row-major data at 17 significant digits.
struct TextContainer {
  std::string magic;
  std::map<std::string, std::string> header;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> blocks;

  bool has_key(const std::string& key) const { return header.count(key) > 0; }
  bool has_block(const std::string& name) const;
  const Eigen::MatrixXd& block(const std::string& name) const;

  double header_double(const std::string& key) const;
  std::int64_t header_int(const std::string& key) const;

  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, const std::string& value);
  void add_block(const std::string& name, const Eigen::MatrixXd& data);

  void write(const std::string& path) const;
  static TextContainer read(const std::string& path,
                            const std::string& expected_magic);
};

}  // namespace iepinn
