/// Observer for value-array cell reads on the query path.
///
/// Every query routine is generic over a probe; [`NoProbe`] compiles away, so
/// the instrumented and plain paths are the same code.
pub trait ReadProbe {
    fn cell_read(&mut self);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoProbe;

impl ReadProbe for NoProbe {
    #[inline(always)]
    fn cell_read(&mut self) {}
}

/// Counts cell reads. A query through any structure in this crate reads
/// exactly two cells unless it had to retry around a concurrent update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadCounter {
    pub reads: u64,
}

impl ReadProbe for ReadCounter {
    #[inline(always)]
    fn cell_read(&mut self) {
        self.reads += 1;
    }
}
