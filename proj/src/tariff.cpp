#include "rolechain/tariff.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rolechain {

ResourceTariff ResourceTariff::defaults() {
  ResourceTariff t;
  auto set = [&](TxKind k, std::uint64_t cpu, std::uint64_t net) {
    t.by_kind[static_cast<std::size_t>(k)] = {cpu, net};
  };
  set(TxKind::RoleAssign, 606, 168);
  set(TxKind::RoleUpdate, 347, 168);
  set(TxKind::RoleRevoke, 209, 104);
  set(TxKind::PermissionAssign, 856, 160);
  set(TxKind::PermissionUpdate, 570, 160);
  set(TxKind::PermissionRevoke, 230, 104);
  set(TxKind::RightTransfer, 511, 176);
  set(TxKind::RemoveRightTransfer, 254, 104);
  set(TxKind::CheckAccess, 305, 104);
  return t;
}

namespace {

std::string trim_copy(std::string s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

Result<ResourceTariff> parse_tariff(const std::string& text) {
  ResourceTariff t = ResourceTariff::defaults();
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim_copy(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      return Result<ResourceTariff>::fail(
          Errc::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim_copy(stripped.substr(0, eq));
    std::string value_text = trim_copy(stripped.substr(eq + 1));
    std::uint64_t value = 0;
    auto [p, ec] =
        std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || p != value_text.data() + value_text.size())
      return Result<ResourceTariff>::fail(
          Errc::ParseError, "line " + std::to_string(line_no) + ": bad number");

    if (key == "ram.bytes_per_permission_row") {
      t.ram_bytes_per_permission_row = value;
      continue;
    }
    std::size_t dot = key.rfind('.');
    if (dot == std::string::npos)
      return Result<ResourceTariff>::fail(
          Errc::ParseError, "line " + std::to_string(line_no) + ": unknown key " + key);
    auto kind = parse_tx_kind(key.substr(0, dot));
    std::string field = key.substr(dot + 1);
    if (!kind || (field != "cpu_us" && field != "net_bytes"))
      return Result<ResourceTariff>::fail(
          Errc::ParseError, "line " + std::to_string(line_no) + ": unknown key " + key);
    auto& cost = t.by_kind[static_cast<std::size_t>(*kind)];
    if (field == "cpu_us")
      cost.cpu_us = value;
    else
      cost.net_bytes = value;
  }
  return Result<ResourceTariff>::success(t);
}

Result<ResourceTariff> load_tariff_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    return Result<ResourceTariff>::fail(Errc::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tariff(buf.str());
}

}  // namespace rolechain
