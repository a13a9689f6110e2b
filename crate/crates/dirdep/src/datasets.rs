//! Small embedded datasets of paired circular measurements, both recorded in
//! degrees.

use crate::geometry::AngleVector;

#[derive(Debug, Clone, Copy)]
pub struct EmbeddedDataset {
    pub name: &'static str,
    pub description: &'static str,
    /// Column headers used when exporting to CSV.
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub x_degrees: &'static [f64],
    pub y_degrees: &'static [f64],
}

/// Estimated peak times (as angles) of two successive diastolic
/// blood-pressure measurements on 10 medical students.
pub const BLOOD_PRESSURE: EmbeddedDataset = EmbeddedDataset {
    name: "bloodpressure",
    description: "peak times of two successive diastolic blood-pressure measurements, \
                  10 subjects, angles in degrees",
    x_label: "theta_deg",
    y_label: "phi_deg",
    x_degrees: &[30.0, 15.0, 11.0, 4.0, 348.0, 347.0, 341.0, 333.0, 332.0, 285.0],
    y_degrees: &[25.0, 5.0, 349.0, 358.0, 340.0, 347.0, 345.0, 331.0, 329.0, 287.0],
};

/// Wind direction at 6 a.m. and 12 p.m. on 21 consecutive days at a
/// Milwaukee weather station.
pub const WIND: EmbeddedDataset = EmbeddedDataset {
    name: "wind",
    description: "wind direction at 6 a.m. and 12 p.m., 21 consecutive days, \
                  angles in degrees",
    x_label: "six_am_deg",
    y_label: "noon_deg",
    x_degrees: &[
        356.0, 97.2, 211.0, 232.0, 343.0, 292.0, 157.0, 302.0, 335.0, 302.0, 324.0, 84.6, 324.0,
        340.0, 157.0, 238.0, 254.0, 146.0, 232.0, 122.0, 329.0,
    ],
    y_degrees: &[
        119.0, 162.0, 221.0, 259.0, 270.0, 28.8, 97.2, 292.0, 39.6, 313.0, 94.2, 45.0, 47.0,
        108.0, 221.0, 270.0, 119.0, 248.0, 270.0, 45.0, 23.4,
    ],
};

pub fn all() -> &'static [&'static EmbeddedDataset] {
    &[&BLOOD_PRESSURE, &WIND]
}

pub fn find(name: &str) -> Option<&'static EmbeddedDataset> {
    all().iter().copied().find(|d| d.name == name)
}

impl EmbeddedDataset {
    pub fn n(&self) -> usize {
        self.x_degrees.len()
    }

    /// Converts both angle columns to radians.
    pub fn to_angles(&self) -> (AngleVector, AngleVector) {
        (
            AngleVector::from_degrees(self.x_degrees).expect("embedded data is finite"),
            AngleVector::from_degrees(self.y_degrees).expect("embedded data is finite"),
        )
    }

    /// CSV rendering with a header row, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.x_label, self.y_label);
        for (x, y) in self.x_degrees.iter().zip(self.y_degrees) {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}
