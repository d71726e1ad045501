#include "courtvec/ingest.hpp"

#include "courtvec/error.hpp"
#include "courtvec/text.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace courtvec {

namespace {

constexpr std::string_view kPlayHeader = "game_id,seq,offense,defense,outcome";
constexpr std::string_view kRawHeader = "game_id,seq,offense,defense,event,shot,ft";
constexpr std::string_view kPlayerHeader =
    "player_id,name,position,minutes,fg_made,threes_made,assists,rebounds,plus_minus";

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::string quote_csv(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<PlayerId> parse_id_list(std::string_view field, std::size_t line) {
  std::vector<PlayerId> ids;
  for (auto tok : text::split(field, ';')) {
    auto v = text::parse_int(tok);
    if (!v || *v < 0) throw ParseError(line, "bad player id '" + std::string(tok) + "'");
    ids.push_back(static_cast<PlayerId>(*v));
  }
  return ids;
}

// Fields shared by both play formats: game id, seq, offense, defense.
struct PlayHead {
  std::string game_id;
  std::uint64_t seq = 0;
  Lineup offense{};
  Lineup defense{};
};

PlayHead parse_head(const std::vector<std::string>& fields, std::size_t line,
                    const PlayerRegistry& registry) {
  PlayHead head;
  head.game_id = fields[0];
  if (head.game_id.empty()) throw ParseError(line, "empty game_id");
  auto seq = text::parse_int(fields[1]);
  if (!seq || *seq < 0) throw ParseError(line, "bad seq '" + fields[1] + "'");
  head.seq = static_cast<std::uint64_t>(*seq);

  auto off = parse_id_list(fields[2], line);
  auto def = parse_id_list(fields[3], line);
  try {
    if (off.size() != kPlayersPerSide || def.size() != kPlayersPerSide) {
      throw Error(ErrorKind::lineup, "lineups need exactly 5 offensive and 5 defensive ids (got " +
                                         std::to_string(off.size()) + "+" +
                                         std::to_string(def.size()) + ")");
    }
    head.offense = checked_lineup(off, registry);
    head.defense = checked_lineup(def, registry);
    check_matchup(head.offense, head.defense);
  } catch (const Error& e) {
    throw Error(e.kind(), line_prefix(line) + e.what());
  }
  return head;
}

bool next_line(std::istream& in, std::string& buf, std::size_t& line_no) {
  while (std::getline(in, buf)) {
    ++line_no;
    if (!text::trim(buf).empty()) return true;
  }
  return false;
}

OutcomeRule::ShotSpec parse_shot_spec(std::string_view s, std::size_t line) {
  if (s == "*") return OutcomeRule::ShotSpec::any;
  if (s == "-") return OutcomeRule::ShotSpec::none;
  if (s == "made") return OutcomeRule::ShotSpec::made;
  if (s == "missed") return OutcomeRule::ShotSpec::missed;
  throw ParseError(line, "bad shot flag '" + std::string(s) + "'");
}

std::optional<FreeThrows> parse_ft_value(std::string_view s) {
  auto parts = text::split(s, '/');
  if (parts.size() != 2) return std::nullopt;
  auto made = text::parse_int(parts[0]);
  auto att = text::parse_int(parts[1]);
  if (!made || !att || *made < 0 || *att < 1 || *made > *att) return std::nullopt;
  return FreeThrows{static_cast<int>(*made), static_cast<int>(*att)};
}

ShotFlag parse_shot_flag(std::string_view s, std::size_t line) {
  if (s == "made") return ShotFlag::made;
  if (s == "missed") return ShotFlag::missed;
  if (s == "-" || s.empty()) return ShotFlag::none;
  throw ParseError(line, "bad shot flag '" + std::string(s) + "'");
}

bool rule_matches(const OutcomeRule& rule, const RawEvent& ev, const std::string& desc) {
  switch (rule.match) {
    case OutcomeRule::Match::any:
      break;
    case OutcomeRule::Match::exact:
      if (desc != rule.pattern) return false;
      break;
    case OutcomeRule::Match::substring:
      if (desc.find(rule.pattern) == std::string::npos) return false;
      break;
  }
  switch (rule.shot) {
    case OutcomeRule::ShotSpec::any: break;
    case OutcomeRule::ShotSpec::none: if (ev.shot != ShotFlag::none) return false; break;
    case OutcomeRule::ShotSpec::made: if (ev.shot != ShotFlag::made) return false; break;
    case OutcomeRule::ShotSpec::missed: if (ev.shot != ShotFlag::missed) return false; break;
  }
  switch (rule.ft) {
    case OutcomeRule::FtSpec::any: break;
    case OutcomeRule::FtSpec::none: if (ev.free_throws) return false; break;
    case OutcomeRule::FtSpec::exact:
      if (!ev.free_throws || *ev.free_throws != rule.ft_value) return false;
      break;
  }
  return true;
}

}  // namespace

// ---- positions and registry ----------------------------------------------

std::string_view to_string(Position p) {
  switch (p) {
    case Position::G: return "G";
    case Position::F: return "F";
    case Position::C: return "C";
    case Position::GF: return "G-F";
    case Position::FC: return "F-C";
  }
  return "?";
}

std::optional<Position> parse_position(std::string_view s) {
  s = text::trim(s);
  if (s == "G") return Position::G;
  if (s == "F") return Position::F;
  if (s == "C") return Position::C;
  if (s == "G-F") return Position::GF;
  if (s == "F-C") return Position::FC;
  return std::nullopt;
}

PlayerRegistry::PlayerRegistry(std::vector<PlayerRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].id != i) {
      throw Error(ErrorKind::registry, "registry ids must be dense and ordered; slot " +
                                           std::to_string(i) + " holds id " +
                                           std::to_string(records_[i].id));
    }
  }
}

PlayerRegistry PlayerRegistry::anonymous(std::size_t v) {
  std::vector<PlayerRecord> recs(v);
  for (std::size_t i = 0; i < v; ++i) {
    recs[i].id = static_cast<PlayerId>(i);
    recs[i].name = "player_" + std::to_string(i);
  }
  return PlayerRegistry(std::move(recs));
}

const PlayerRecord& PlayerRegistry::at(PlayerId id) const {
  if (!contains(id)) throw Error(ErrorKind::unknown_player, "unknown player id " + std::to_string(id));
  return records_[id];
}

std::optional<PlayerId> PlayerRegistry::find_by_name(std::string_view name) const {
  for (const auto& r : records_) {
    if (r.name == name) return r.id;
  }
  return std::nullopt;
}

PlayerRegistry build_registry(std::istream& in) {
  std::string buf;
  std::size_t line = 0;
  if (!next_line(in, buf, line) || text::trim(text::chomp(buf)) != kPlayerHeader) {
    throw ParseError(line, "expected header '" + std::string(kPlayerHeader) + "'");
  }
  std::map<PlayerId, PlayerRecord> by_id;
  while (next_line(in, buf, line)) {
    auto f = text::split_csv(text::chomp(buf));
    if (f.size() != 9) throw ParseError(line, "expected 9 fields, got " + std::to_string(f.size()));
    PlayerRecord r;
    auto id = text::parse_int(f[0]);
    if (!id || *id < 0) throw ParseError(line, "bad player_id '" + f[0] + "'");
    r.id = static_cast<PlayerId>(*id);
    r.name = f[1];
    auto pos = parse_position(f[2]);
    if (!pos) throw ParseError(line, "bad position '" + f[2] + "'");
    r.position = *pos;
    auto minutes = text::parse_double(f[3]);
    if (!minutes) throw ParseError(line, "bad minutes '" + f[3] + "'");
    if (*minutes < 0) throw Error(ErrorKind::value, line_prefix(line) + "negative minutes");
    r.minutes = *minutes;

    std::int64_t* counts[] = {&r.fg_made, &r.threes_made, &r.assists, &r.rebounds};
    for (int k = 0; k < 4; ++k) {
      auto v = text::parse_int(f[4 + k]);
      if (!v) throw ParseError(line, "bad count '" + f[4 + k] + "'");
      if (*v < 0) throw Error(ErrorKind::value, line_prefix(line) + "negative count '" + f[4 + k] + "'");
      *counts[k] = *v;
    }
    auto pm = text::parse_int(f[8]);
    if (!pm) throw ParseError(line, "bad plus_minus '" + f[8] + "'");
    r.plus_minus = *pm;

    if (by_id.contains(r.id)) {
      throw Error(ErrorKind::duplicate, line_prefix(line) + "duplicate player id " + std::to_string(r.id));
    }
    by_id.emplace(r.id, std::move(r));
  }
  std::vector<PlayerRecord> recs;
  recs.reserve(by_id.size());
  for (auto& [id, rec] : by_id) {
    if (id != recs.size()) {
      throw Error(ErrorKind::registry, "player ids must be dense 0..v-1; missing id " +
                                           std::to_string(recs.size()));
    }
    recs.push_back(std::move(rec));
  }
  return PlayerRegistry(std::move(recs));
}

void write_registry(std::ostream& out, const PlayerRegistry& registry) {
  out << kPlayerHeader << '\n';
  for (const auto& r : registry.records()) {
    out << r.id << ',' << quote_csv(r.name) << ',' << to_string(r.position) << ','
        << text::format_double(r.minutes) << ',' << r.fg_made << ',' << r.threes_made << ','
        << r.assists << ',' << r.rebounds << ',' << r.plus_minus << '\n';
  }
}

// ---- plays -------------------------------------------------------------------

Lineup checked_lineup(std::span<const PlayerId> ids, const PlayerRegistry& registry) {
  if (ids.size() != kPlayersPerSide) {
    throw Error(ErrorKind::lineup, "a lineup needs exactly 5 players, got " + std::to_string(ids.size()));
  }
  Lineup out{};
  std::copy(ids.begin(), ids.end(), out.begin());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw Error(ErrorKind::lineup, "player listed twice in one lineup");
  }
  for (auto id : out) {
    if (!registry.contains(id)) {
      throw Error(ErrorKind::registry, "player id " + std::to_string(id) + " not in registry");
    }
  }
  return out;
}

void check_matchup(const Lineup& offense, const Lineup& defense) {
  for (auto a : offense) {
    if (std::find(defense.begin(), defense.end(), a) != defense.end()) {
      throw Error(ErrorKind::lineup, "player " + std::to_string(a) + " appears on both sides");
    }
  }
}

std::vector<Play> parse_plays(std::istream& in, const PlayerRegistry& registry) {
  std::string buf;
  std::size_t line = 0;
  if (!next_line(in, buf, line) || text::trim(text::chomp(buf)) != kPlayHeader) {
    throw ParseError(line, "expected header '" + std::string(kPlayHeader) + "'");
  }
  std::vector<Play> plays;
  while (next_line(in, buf, line)) {
    auto f = text::split_csv(text::chomp(buf));
    if (f.size() != 5) throw ParseError(line, "expected 5 fields, got " + std::to_string(f.size()));
    auto head = parse_head(f, line, registry);
    auto outcome = text::parse_int(f[4]);
    if (!outcome) throw ParseError(line, "bad outcome '" + f[4] + "'");
    if (*outcome < 0 || *outcome >= static_cast<long long>(kNumOutcomes)) {
      throw Error(ErrorKind::outcome, line_prefix(line) + "outcome " + f[4] + " outside 0..22");
    }
    plays.push_back(Play{std::move(head.game_id), head.seq, head.offense, head.defense,
                         static_cast<int>(*outcome)});
  }
  return plays;
}

void write_plays(std::ostream& out, std::span<const Play> plays) {
  out << kPlayHeader << '\n';
  auto ids = [&out](const Lineup& l) {
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (k) out << ';';
      out << l[k];
    }
  };
  for (const auto& p : plays) {
    out << quote_csv(p.game_id) << ',' << p.seq << ',';
    ids(p.offense);
    out << ',';
    ids(p.defense);
    out << ',' << p.outcome << '\n';
  }
}

// ---- outcome rules -----------------------------------------------------------

OutcomeMapping parse_rules(std::istream& in) {
  OutcomeMapping mapping;
  std::string buf;
  std::size_t line = 0;
  while (std::getline(in, buf)) {
    ++line;
    auto s = text::trim(text::chomp(buf));
    if (s.empty() || s.front() == '#') continue;
    auto parts = text::split(s, '|');
    if (parts.size() != 4) throw ParseError(line, "rule needs pattern|shot|ft|class");

    OutcomeRule rule;
    auto pattern = text::trim(parts[0]);
    if (pattern.empty()) throw ParseError(line, "empty pattern");
    if (pattern == "*") {
      rule.match = OutcomeRule::Match::any;
    } else if (pattern.front() == '=') {
      rule.match = OutcomeRule::Match::exact;
      rule.pattern = text::to_lower(text::trim(pattern.substr(1)));
    } else {
      rule.pattern = text::to_lower(pattern);
    }
    rule.shot = parse_shot_spec(text::trim(parts[1]), line);

    auto ft = text::trim(parts[2]);
    if (ft == "*") {
      rule.ft = OutcomeRule::FtSpec::any;
    } else if (ft == "-") {
      rule.ft = OutcomeRule::FtSpec::none;
    } else {
      auto v = parse_ft_value(ft);
      if (!v) throw ParseError(line, "bad free-throw spec '" + std::string(ft) + "'");
      rule.ft = OutcomeRule::FtSpec::exact;
      rule.ft_value = *v;
    }

    auto target = text::trim(parts[3]);
    if (target != "drop") {
      auto cls = text::parse_int(target);
      if (!cls) throw ParseError(line, "bad class '" + std::string(target) + "'");
      if (*cls < 0 || *cls >= static_cast<long long>(kNumOutcomes)) {
        throw Error(ErrorKind::outcome, line_prefix(line) + "rule class outside 0..22");
      }
      rule.target = static_cast<int>(*cls);
    }
    mapping.rules.push_back(std::move(rule));
  }
  if (mapping.rules.empty()) throw Error(ErrorKind::argument, "rule file contains no rules");
  return mapping;
}

const OutcomeMapping& default_mapping() {
  static const OutcomeMapping mapping = [] {
    std::istringstream in{std::string(default_rules_text())};
    return parse_rules(in);
  }();
  return mapping;
}

std::optional<int> map_raw_outcome(const RawEvent& event, const OutcomeMapping& mapping) {
  if (mapping.rules.empty()) throw Error(ErrorKind::argument, "empty outcome mapping");
  const auto desc = text::to_lower(text::trim(event.description));
  for (const auto& rule : mapping.rules) {
    if (rule_matches(rule, event, desc)) return rule.target;
  }
  throw Error(ErrorKind::unmapped_event, "no rule matches raw event '" + event.description + "'");
}

IngestResult ingest(std::istream& in, const PlayerRegistry& registry, const OutcomeMapping& mapping) {
  std::string buf;
  std::size_t line = 0;
  if (!next_line(in, buf, line)) throw ParseError(line, "empty play file");
  const auto header = text::trim(text::chomp(buf));
  if (header == kPlayHeader) {
    std::string all{std::string(kPlayHeader) + "\n"};
    all.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    std::istringstream again(all);
    return IngestResult{parse_plays(again, registry), 0};
  }
  if (header != kRawHeader) {
    throw ParseError(line, "expected header '" + std::string(kPlayHeader) + "' or '" +
                               std::string(kRawHeader) + "'");
  }
  IngestResult result;
  while (next_line(in, buf, line)) {
    auto f = text::split_csv(text::chomp(buf));
    if (f.size() != 7) throw ParseError(line, "expected 7 fields, got " + std::to_string(f.size()));
    auto head = parse_head(f, line, registry);
    RawEvent ev;
    ev.description = f[4];
    ev.shot = parse_shot_flag(text::trim(f[5]), line);
    auto ft = text::trim(f[6]);
    if (!ft.empty() && ft != "-") {
      ev.free_throws = parse_ft_value(ft);
      if (!ev.free_throws) throw ParseError(line, "bad free-throw result '" + std::string(ft) + "'");
    }
    std::optional<int> cls;
    try {
      cls = map_raw_outcome(ev, mapping);
    } catch (const Error& e) {
      throw Error(e.kind(), line_prefix(line) + e.what());
    }
    if (!cls) {
      ++result.dropped;
      continue;
    }
    result.plays.push_back(Play{std::move(head.game_id), head.seq, head.offense, head.defense, *cls});
  }
  return result;
}

// ---- splits --------------------------------------------------------------------

Split chronological_split(std::span<const Play> plays, std::size_t holdout_games) {
  std::vector<std::string_view> order;
  std::unordered_set<std::string_view> seen;
  for (const auto& p : plays) {
    if (seen.insert(p.game_id).second) order.push_back(p.game_id);
  }
  if (holdout_games > order.size()) {
    throw Error(ErrorKind::argument, "holdout of " + std::to_string(holdout_games) +
                                         " games exceeds the " + std::to_string(order.size()) +
                                         " games available");
  }
  std::unordered_set<std::string_view> held(order.end() - static_cast<std::ptrdiff_t>(holdout_games),
                                            order.end());
  Split split;
  for (const auto& p : plays) {
    (held.contains(p.game_id) ? split.validation : split.train).push_back(p);
  }
  return split;
}

std::map<Lineup, std::size_t> lineup_frequencies(std::span<const Play> plays) {
  std::map<Lineup, std::size_t> freq;
  for (const auto& p : plays) {
    ++freq[p.offense];
    ++freq[p.defense];
  }
  return freq;
}

std::vector<PlayerId> most_frequent_players(std::span<const Play> plays, std::size_t top) {
  std::unordered_map<PlayerId, std::size_t> counts;
  for (const auto& p : plays) {
    for (auto id : p.offense) ++counts[id];
    for (auto id : p.defense) ++counts[id];
  }
  std::vector<std::pair<PlayerId, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<PlayerId> out;
  for (std::size_t k = 0; k < ranked.size() && k < top; ++k) out.push_back(ranked[k].first);
  return out;
}

}  // namespace courtvec
