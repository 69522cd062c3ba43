use crate::model::{NodeId, TransportGraph};

const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Haversine distance in metres.
pub fn great_circle_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

/// Admissible remaining-time bound: straight-line distance over the
/// fastest speed seen on any edge of the graph.
#[derive(Clone, Debug)]
pub struct GeoBound {
    coords: Vec<(f64, f64)>,
    /// Metres per second; infinite when some edge covers distance in no time.
    max_speed: f64,
}

impl GeoBound {
    pub fn new(graph: &TransportGraph) -> GeoBound {
        let coords: Vec<(f64, f64)> = graph.records().iter().map(|r| (r.lat, r.lon)).collect();
        let mut max_speed: f64 = 0.0;
        for (u, e) in graph.edges() {
            let (a, b) = (coords[u.index()], coords[e.target.index()]);
            let d = great_circle_m(a.0, a.1, b.0, b.1);
            if d == 0.0 {
                continue;
            }
            let mut fastest = u32::MAX;
            if e.atf.walk().is_finite() {
                fastest = e.atf.walk().secs();
            }
            let tt = e.atf.timetable();
            for (dep, arr) in tt.departures().iter().zip(tt.arrivals()) {
                fastest = fastest.min(arr.secs() - dep.secs());
            }
            if fastest != u32::MAX {
                max_speed = max_speed.max(d / fastest as f64);
            }
        }
        GeoBound { coords, max_speed }
    }

    pub fn max_speed(&self) -> f64 {
        self.max_speed
    }

    /// Lower bound in whole seconds on travel time from `v` to `target`.
    #[inline]
    pub fn bound(&self, v: NodeId, target: NodeId) -> u32 {
        if self.max_speed == 0.0 || self.max_speed.is_infinite() {
            return 0;
        }
        let (a, b) = (self.coords[v.index()], self.coords[target.index()]);
        (great_circle_m(a.0, a.1, b.0, b.1) / self.max_speed).floor() as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_degree_of_latitude() {
        let d = great_circle_m(0.0, 0.0, 1.0, 0.0);
        assert!((d - 111_195.0).abs() < 5.0, "{d}");
        assert_eq!(great_circle_m(10.0, 20.0, 10.0, 20.0), 0.0);
    }
}
