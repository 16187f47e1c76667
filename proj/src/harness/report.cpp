#include <chrono>
#include <ctime>
#include <sstream>

#include "dyadic/harness.hpp"

namespace dyadic::harness {
namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// RFC 4180 quoting
std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

bool Report::passed() const {
  for (const auto& a : assertions) {
    if (!a.passed) return false;
  }
  return true;
}

nlohmann::json Report::to_json(bool with_timestamp) const {
  nlohmann::json j = body.is_null() ? nlohmann::json::object() : body;
  j["name"] = name;
  j["kind"] = to_string(kind);
  nlohmann::json as = nlohmann::json::array();
  for (const auto& a : assertions) {
    as.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  j["assertions"] = std::move(as);
  j["passed"] = passed();
  if (with_timestamp) j["generated_at"] = utc_now();
  return j;
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cell(cells[i]);
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

}  // namespace dyadic::harness
