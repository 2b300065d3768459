//! Sizing payload shared by the `size` command and the HTTP service.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use zerog_core::env::{Atmosphere, MissionConstraints, MissionConstraintsRaw, VehicleParams, VehicleParamsRaw};
use zerog_core::presets;
use zerog_core::sizing::export::{PlanSummary, PlotBundle};
use zerog_core::sizing::{solve_mission, Constraint, SizingError};

/// Outcome of one sizing request. Infeasibility is a domain answer, not an
/// error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SizePayload {
    Feasible { summary: PlanSummary, profiles: PlotBundle },
    Infeasible { constraint: Constraint, detail: String },
}

/// A rejected input field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SizeError {
    #[error("invalid request: {}", .0.iter().map(|e| format!("{}: {}", e.field, e.message)).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<FieldError>),
    #[error(transparent)]
    Solver(SizingError),
}

/// Body of `POST /api/size`. Vehicle fields override the named preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeRequest {
    #[serde(default = "default_preset")]
    pub preset: String,
    #[serde(default)]
    pub vehicle: Map<String, Value>,
    #[serde(default)]
    pub constraints: MissionConstraintsRaw,
    #[serde(default)]
    pub atmosphere: Atmosphere,
}

fn default_preset() -> String {
    "nominal".into()
}

impl Default for SizeRequest {
    fn default() -> Self {
        Self {
            preset: default_preset(),
            vehicle: Map::new(),
            constraints: MissionConstraintsRaw::default(),
            atmosphere: Atmosphere::default(),
        }
    }
}

impl SizeRequest {
    /// Validates every field and returns the solver inputs.
    pub fn resolve(&self) -> Result<(VehicleParams, MissionConstraints, Atmosphere), Vec<FieldError>> {
        let mut errors = Vec::new();
        let field = |f: &str, m: String| FieldError {
            field: f.to_string(),
            message: m,
        };
        let raw = match presets::by_name(&self.preset) {
            Some(p) => {
                let mut v = serde_json::to_value(p.to_raw()).expect("raw params serialise");
                let obj = v.as_object_mut().expect("raw params are an object");
                for (k, val) in &self.vehicle {
                    obj.insert(k.clone(), val.clone());
                }
                match serde_json::from_value::<VehicleParamsRaw>(v) {
                    Ok(raw) => Some(raw),
                    Err(e) => {
                        errors.push(field("vehicle", e.to_string()));
                        None
                    }
                }
            }
            None => {
                errors.push(field("preset", format!("unknown preset `{}`", self.preset)));
                None
            }
        };
        if let Some(raw) = &raw {
            errors.extend(raw.problems().into_iter().map(|e| field(&e.field, e.reason)));
        }
        errors.extend(self.constraints.problems().into_iter().map(|e| field(&e.field, e.reason)));
        if let Err(e) = self.atmosphere.validate() {
            errors.push(field(&e.field, e.reason));
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let params = VehicleParams::new(raw.expect("validated")).expect("validated");
        let constraints = MissionConstraints::new(self.constraints.clone()).expect("validated");
        Ok((params, constraints, self.atmosphere))
    }
}

/// Solves one mission and packages the answer.
pub fn size_payload(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    constraints: &MissionConstraints,
) -> Result<SizePayload, SizeError> {
    match solve_mission(params, atmosphere, constraints) {
        Ok(plan) => Ok(SizePayload::Feasible {
            summary: PlanSummary::from(&plan),
            profiles: PlotBundle::from(&plan),
        }),
        Err(SizingError::Infeasible { constraint, detail }) => Ok(SizePayload::Infeasible { constraint, detail }),
        Err(SizingError::Param(e)) => Err(SizeError::Invalid(vec![FieldError {
            field: e.field,
            message: e.reason,
        }])),
        Err(e) => Err(SizeError::Solver(e)),
    }
}

pub fn size_request(req: &SizeRequest) -> Result<SizePayload, SizeError> {
    let (p, c, atm) = req.resolve().map_err(SizeError::Invalid)?;
    size_payload(&p, &atm, &c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_request_is_nominal_preset() {
        let (p, c, _) = SizeRequest::default().resolve().unwrap();
        assert_eq!(p, presets::nominal());
        assert_eq!(c, MissionConstraints::default());
    }

    #[test]
    fn vehicle_fields_override_preset() {
        let req: SizeRequest = serde_json::from_str(r#"{"preset":"light","vehicle":{"mass_kg":3.5}}"#).unwrap();
        let (p, _, _) = req.resolve().unwrap();
        assert_eq!(p.mass(), 3.5);
        assert_eq!(p.engine_power(), presets::light().engine_power());
    }

    #[test]
    fn every_bad_field_is_reported() {
        let req: SizeRequest = serde_json::from_str(
            r#"{"preset":"nominal","vehicle":{"mass_kg":0,"engine_power_w":-5},"constraints":{"park_altitude_m":200}}"#,
        )
        .unwrap();
        let fields: Vec<String> = req.resolve().unwrap_err().into_iter().map(|e| e.field).collect();
        assert_eq!(fields, ["mass", "engine_power", "park_altitude"]);
    }

    #[test]
    fn unknown_vehicle_field_is_rejected() {
        let req: SizeRequest = serde_json::from_str(r#"{"vehicle":{"wings":2}}"#).unwrap();
        let errs = req.resolve().unwrap_err();
        assert_eq!(errs[0].field, "vehicle");
        assert!(errs[0].message.contains("wings"));
    }

    #[test]
    fn hover_infeasibility_is_a_payload() {
        let req: SizeRequest = serde_json::from_str(r#"{"vehicle":{"mass_kg":40}}"#).unwrap();
        match size_request(&req).unwrap() {
            SizePayload::Infeasible { constraint, .. } => assert_eq!(constraint, Constraint::Hover),
            other => panic!("{other:?}"),
        }
    }
}
