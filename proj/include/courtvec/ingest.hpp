#pragma once

#include "courtvec/outcomes.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace courtvec {

using PlayerId = std::uint32_t;
using Lineup = std::array<PlayerId, kPlayersPerSide>;

/// One possession: who was on the floor and how it ended.
struct Play {
  std::string game_id;
  std::uint64_t seq = 0;
  Lineup offense{};
  Lineup defense{};
  int outcome = 0;

  friend bool operator==(const Play&, const Play&) = default;
};

enum class Position { G, F, C, GF, FC };

std::string_view to_string(Position p);
std::optional<Position> parse_position(std::string_view s);

struct PlayerRecord {
  PlayerId id = 0;
  std::string name;
  Position position = Position::G;
  double minutes = 0.0;
  std::int64_t fg_made = 0;
  std::int64_t threes_made = 0;
  std::int64_t assists = 0;
  std::int64_t rebounds = 0;
  std::int64_t plus_minus = 0;

  friend bool operator==(const PlayerRecord&, const PlayerRecord&) = default;
};

/// Players indexed densely by id 0..size()-1.
class PlayerRegistry {
 public:
  PlayerRegistry() = default;
  explicit PlayerRegistry(std::vector<PlayerRecord> records);

  /// Placeholder registry of v unnamed players, for files that only carry ids.
  static PlayerRegistry anonymous(std::size_t v);

  std::size_t size() const { return records_.size(); }
  bool contains(PlayerId id) const { return id < records_.size(); }
  const PlayerRecord& at(PlayerId id) const;
  std::span<const PlayerRecord> records() const { return records_; }

  /// Exact (case-sensitive) name lookup; first match by id.
  std::optional<PlayerId> find_by_name(std::string_view name) const;

 private:
  std::vector<PlayerRecord> records_;
};

PlayerRegistry build_registry(std::istream& in);
void write_registry(std::ostream& out, const PlayerRegistry& registry);

/// Validates 5+5 distinct ids, all known to the registry; returns the lineup sorted.
Lineup checked_lineup(std::span<const PlayerId> ids, const PlayerRegistry& registry);
void check_matchup(const Lineup& offense, const Lineup& defense);

std::vector<Play> parse_plays(std::istream& in, const PlayerRegistry& registry);
void write_plays(std::ostream& out, std::span<const Play> plays);

// ---- raw outcome mapping --------------------------------------------------

enum class ShotFlag { none, made, missed };

struct FreeThrows {
  int made = 0;
  int attempts = 0;
  friend bool operator==(const FreeThrows&, const FreeThrows&) = default;
};

/// An un-normalized play description as it appears in a raw feed.
struct RawEvent {
  std::string description;
  ShotFlag shot = ShotFlag::none;
  std::optional<FreeThrows> free_throws;
};

struct OutcomeRule {
  enum class Match { any, substring, exact };
  enum class ShotSpec { any, none, made, missed };
  enum class FtSpec { any, none, exact };

  Match match = Match::substring;
  std::string pattern;  // lower-case
  ShotSpec shot = ShotSpec::any;
  FtSpec ft = FtSpec::any;
  FreeThrows ft_value{};
  /// Target class, or nullopt for rows dropped at ingest (rebounds, defensive plays).
  std::optional<int> target;
};

/// Ordered rules; the first rule matching an event decides it.
struct OutcomeMapping {
  std::vector<OutcomeRule> rules;
};

OutcomeMapping parse_rules(std::istream& in);
const OutcomeMapping& default_mapping();
std::string_view default_rules_text();

/// Class of the first matching rule, or nullopt when that rule drops the event.
/// Throws unmapped_event when nothing matches.
std::optional<int> map_raw_outcome(const RawEvent& event, const OutcomeMapping& mapping);

struct IngestResult {
  std::vector<Play> plays;
  std::size_t dropped = 0;
};

/// Reads a raw feed (`game_id,seq,offense,defense,event,shot,ft`) and maps each
/// event through the rules. Accepts the normalized play format too.
IngestResult ingest(std::istream& in, const PlayerRegistry& registry, const OutcomeMapping& mapping);

// ---- splits and frequency helpers ----------------------------------------

struct Split {
  std::vector<Play> train;
  std::vector<Play> validation;
};

/// Holds out every play of the final `holdout_games` distinct games, in order of first appearance.
Split chronological_split(std::span<const Play> plays, std::size_t holdout_games);

/// Occurrence count of each exact 5-player lineup across both sides of every play.
std::map<Lineup, std::size_t> lineup_frequencies(std::span<const Play> plays);

/// Players ordered by appearance count (descending, ties by id), truncated to `top`.
std::vector<PlayerId> most_frequent_players(std::span<const Play> plays, std::size_t top);

}  // namespace courtvec
