#include "courtvec/outcomes.hpp"

#include "courtvec/error.hpp"

#include <string>

namespace courtvec {

namespace {

constexpr std::array<std::string_view, kNumOutcomes> kLabels = {
    "Mid-range jump shot made",
    "Mid-range jump shot missed",
    "Mid-range jump shot made + 1 free throw made",
    "Mid-range jump shot made + 1 free throw missed",
    "Close-range shot made",
    "Close-range shot missed",
    "Close-range shot made + 1 free throw made",
    "Close-range shot made + 1 free throw missed",
    "0/1 FT made",
    "1/1 FT made",
    "0/2 FT made",
    "1/2 FT made",
    "2/2 FT made",
    "0/3 FT made",
    "1/3 FT made",
    "2/3 FT made",
    "3/3 FT made",
    "3PT shot made",
    "3PT shot missed",
    "3PT shot made + 1 free throw made",
    "3PT shot made + 1 free throw missed",
    "Turnover",
    "Foul",
};

// Basketball scoring applied to each class. Fouls end the possession scoreless.
constexpr std::array<int, kNumOutcomes> kPoints = {
    2, 0, 3, 2, 2, 0, 3, 2, 0, 1, 0, 1, 2, 0, 1, 2, 3, 3, 0, 4, 3, 0, 0,
};

void check_class(int cls) {
  if (cls < 0 || cls >= static_cast<int>(kNumOutcomes)) {
    throw Error(ErrorKind::argument, "outcome class out of range: " + std::to_string(cls));
  }
}

}  // namespace

std::string_view outcome_label(int cls) {
  check_class(cls);
  return kLabels[static_cast<std::size_t>(cls)];
}

int outcome_points(int cls) {
  check_class(cls);
  return kPoints[static_cast<std::size_t>(cls)];
}

bool is_made_field_goal(int cls) {
  switch (cls) {
    case 0: case 2: case 3: case 4: case 6: case 7: case 17: case 19: case 20:
      return true;
    default:
      return false;
  }
}

bool is_made_three(int cls) { return cls == 17 || cls == 19 || cls == 20; }

bool is_missed_field_goal(int cls) { return cls == 1 || cls == 5 || cls == 18; }

}  // namespace courtvec
