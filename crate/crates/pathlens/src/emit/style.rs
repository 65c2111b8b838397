use std::fmt;

use pathlens_core::Theme;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `#rrggbb`, stored lower-case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HexColor(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("colour {0:?} is not of the form #rrggbb")]
pub struct BadColor(pub String);

impl HexColor {
    pub fn new(s: &str) -> Result<Self, BadColor> {
        let digits = s.strip_prefix('#').unwrap_or("");
        if digits.len() == 6 && digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            Ok(HexColor(s.to_ascii_lowercase()))
        } else {
            Err(BadColor(s.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for HexColor {
    type Error = BadColor;

    fn try_from(s: String) -> Result<Self, BadColor> {
        HexColor::new(&s)
    }
}

impl From<HexColor> for String {
    fn from(c: HexColor) -> String {
        c.0
    }
}

impl fmt::Display for HexColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Palette {
    pub video: HexColor,
    pub article: HexColor,
    pub quiz: HexColor,
    pub discussion: HexColor,
    pub assignment: HexColor,
    pub review: HexColor,
    pub feedback_view: HexColor,
}

impl Default for Palette {
    fn default() -> Self {
        let c = |s| HexColor::new(s).expect("built-in colour");
        Palette {
            video: c("#1f77b4"),
            article: c("#ff7f0e"),
            quiz: c("#2ca02c"),
            discussion: c("#d62728"),
            assignment: c("#9467bd"),
            review: c("#8c564b"),
            feedback_view: c("#e377c2"),
        }
    }
}

impl Palette {
    pub fn get(&self, theme: Theme) -> &HexColor {
        match theme {
            Theme::Video => &self.video,
            Theme::Article => &self.article,
            Theme::Quiz => &self.quiz,
            Theme::Discussion => &self.discussion,
            Theme::Assignment => &self.assignment,
            Theme::Review => &self.review,
            Theme::FeedbackView => &self.feedback_view,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderStyle {
    pub palette: Palette,
    /// Node width in inches per square root of a learner, so area tracks the count.
    pub node_scale: f64,
    /// Edge pen width per percentage point.
    pub edge_scale: f64,
    pub node_labels: bool,
    pub edge_labels: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            palette: Palette::default(),
            node_scale: 0.05,
            edge_scale: 0.05,
            node_labels: true,
            edge_labels: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StyleError {
    #[error("{name} must be a positive finite number, got {value}")]
    Scale { name: &'static str, value: f64 },
}

impl RenderStyle {
    pub fn validate(&self) -> Result<(), StyleError> {
        for (name, value) in [("node_scale", self.node_scale), ("edge_scale", self.edge_scale)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(StyleError::Scale { name, value });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colours() {
        assert_eq!(HexColor::new("#A1b2C3").unwrap().as_str(), "#a1b2c3");
        for bad in ["a1b2c3", "#a1b2c", "#a1b2c3d", "#g1b2c3", "#"] {
            assert!(HexColor::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn style_file_overrides() {
        let s: RenderStyle = serde_json::from_str(r##"{"palette": {"quiz": "#000000"}, "node_scale": 0.2}"##).unwrap();
        assert_eq!(s.palette.get(Theme::Quiz).as_str(), "#000000");
        assert_eq!(s.palette.get(Theme::Video).as_str(), "#1f77b4");
        assert_eq!(s.node_scale, 0.2);
        assert!(serde_json::from_str::<RenderStyle>(r##"{"palette": {"quiz": "black"}}"##).is_err());
        let bad = RenderStyle {
            edge_scale: 0.0,
            ..RenderStyle::default()
        };
        assert!(bad.validate().is_err());
    }
}
