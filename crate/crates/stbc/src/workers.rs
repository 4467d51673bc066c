use rayon::ThreadPool;

/// Environment variable holding the default worker count.
pub const ENV: &str = "STBC_WORKERS";

/// `flag`, else `$STBC_WORKERS`, else the number of available cores.
pub fn resolve(flag: Option<usize>) -> usize {
    flag.filter(|&n| n > 0)
        .or_else(|| std::env::var(ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn pool(workers: usize) -> crate::Result<ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?)
}
