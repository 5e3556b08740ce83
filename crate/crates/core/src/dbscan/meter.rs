/// One logged unit of work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditEvent {
    /// A point-to-point distance evaluation.
    Distance(usize, usize),
    /// A range query that reported `size` points around `point`.
    Neighborhood { point: usize, size: usize },
}

/// Work counters for one run.
///
/// `seed` drives every randomized choice made during the run, so a run is
/// reproducible from its meter's starting state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Meter {
    pub distance_computations: u64,
    /// Sum of reported neighbourhood sizes.
    pub seeds: u64,
    pub seed: u64,
    audit: Option<Vec<AuditEvent>>,
}

impl Meter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_seed(seed: u64) -> Self {
        Meter { seed, ..Self::default() }
    }

    /// A meter that also logs every counted event.
    pub fn audited(seed: u64) -> Self {
        Meter { seed, audit: Some(Vec::new()), ..Self::default() }
    }

    #[inline]
    pub(crate) fn distance(&mut self, i: usize, j: usize) {
        self.distance_computations += 1;
        if let Some(log) = self.audit.as_mut() {
            log.push(AuditEvent::Distance(i, j));
        }
    }

    pub(crate) fn neighborhood(&mut self, point: usize, size: usize) {
        self.seeds += size as u64;
        if let Some(log) = self.audit.as_mut() {
            log.push(AuditEvent::Neighborhood { point, size });
        }
    }

    pub fn audit_log(&self) -> Option<&[AuditEvent]> {
        self.audit.as_deref()
    }

    /// `(distance_computations, seeds)` recounted from the log.
    pub fn recount(&self) -> Option<(u64, u64)> {
        let log = self.audit.as_ref()?;
        let mut d = 0;
        let mut s = 0;
        for e in log {
            match e {
                AuditEvent::Distance(..) => d += 1,
                AuditEvent::Neighborhood { size, .. } => s += *size as u64,
            }
        }
        Some((d, s))
    }
}
