#include "lognokit/types.hpp"

namespace lognokit {

std::string to_string(Cohort c) {
  return c == Cohort::Healthy ? "healthy" : "patient";
}

std::string to_string(Wrist w) { return w == Wrist::Left ? "left" : "right"; }

std::string to_string(Scenario s) { return s == Scenario::L1 ? "L1" : "L2"; }

std::string to_string(MovementClass m) {
  switch (m) {
    case MovementClass::M1_ShoulderExtFlex: return "M1";
    case MovementClass::M2_ShoulderAddAbd: return "M2";
    case MovementClass::M3_ShoulderRotation: return "M3";
    case MovementClass::M4_ElbowFlexExt: return "M4";
    case MovementClass::NonTarget: return "NONE";
  }
  return "NONE";
}

std::optional<Cohort> cohort_from_string(std::string_view s) {
  if (s == "healthy" || s == "Healthy") return Cohort::Healthy;
  if (s == "patient" || s == "Patient") return Cohort::Patient;
  return std::nullopt;
}

std::optional<Wrist> wrist_from_string(std::string_view s) {
  if (s == "left" || s == "Left") return Wrist::Left;
  if (s == "right" || s == "Right") return Wrist::Right;
  return std::nullopt;
}

std::optional<Scenario> scenario_from_string(std::string_view s) {
  if (s == "L1" || s == "l1") return Scenario::L1;
  if (s == "L2" || s == "l2") return Scenario::L2;
  return std::nullopt;
}

std::optional<MovementClass> movement_class_from_string(std::string_view s) {
  if (s == "M1") return MovementClass::M1_ShoulderExtFlex;
  if (s == "M2") return MovementClass::M2_ShoulderAddAbd;
  if (s == "M3") return MovementClass::M3_ShoulderRotation;
  if (s == "M4") return MovementClass::M4_ElbowFlexExt;
  if (s == "NONE") return MovementClass::NonTarget;
  return std::nullopt;
}

}  // namespace lognokit
