//! Byte-level delivery simulation.
//!
//! The server holds N files, each split into F equal subfiles; a cache stores
//! subfile j of every file when its column stars row j. Given a demand vector
//! the server sends one message per distinct (symbol, replica) tag: the XOR
//! of subfile j of user k's demanded file over all cells (j, k) holding that
//! tag. A user recovers a missing subfile by XORing the matching message with
//! the other participating subfiles, all of which it has cached because the
//! cross cells of equal entries are stars. Decoding therefore exercises the
//! defining conditions end to end, on real bytes.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gpda::{GCell, GeneralizedPda};
use crate::pda::Pda;
use crate::rate::LoadValue;

/// Cap on total library bytes generated by default (256 MiB).
pub const DEFAULT_LIBRARY_BUDGET: usize = 1 << 28;

/// A deterministic pseudo-random file library.
#[derive(Debug, Clone)]
pub struct Library {
    num_files: usize,
    subfiles_per_file: usize,
    subfile_bytes: usize,
    seed: u64,
    blocks: Vec<Vec<Vec<u8>>>, // [file][subfile]
}

impl Library {
    pub fn generate(
        num_files: usize,
        subfiles_per_file: usize,
        subfile_bytes: usize,
        seed: u64,
    ) -> Result<Library> {
        Library::generate_bounded(
            num_files,
            subfiles_per_file,
            subfile_bytes,
            seed,
            DEFAULT_LIBRARY_BUDGET,
        )
    }

    pub fn generate_bounded(
        num_files: usize,
        subfiles_per_file: usize,
        subfile_bytes: usize,
        seed: u64,
        byte_budget: usize,
    ) -> Result<Library> {
        if num_files == 0 || subfiles_per_file == 0 || subfile_bytes == 0 {
            return Err(Error::Argument(
                "files, subfiles and subfile bytes must all be positive".into(),
            ));
        }
        let total = num_files
            .checked_mul(subfiles_per_file)
            .and_then(|x| x.checked_mul(subfile_bytes));
        if total.map_or(true, |t| t > byte_budget) {
            return Err(Error::Budget(format!(
                "{num_files} x {subfiles_per_file} x {subfile_bytes} bytes exceed \
                 the budget of {byte_budget}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks = (0..num_files)
            .map(|_| {
                (0..subfiles_per_file)
                    .map(|_| {
                        let mut block = vec![0u8; subfile_bytes];
                        rng.fill_bytes(&mut block);
                        block
                    })
                    .collect()
            })
            .collect();
        Ok(Library { num_files, subfiles_per_file, subfile_bytes, seed, blocks })
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn subfiles_per_file(&self) -> usize {
        self.subfiles_per_file
    }

    pub fn subfile_bytes(&self) -> usize {
        self.subfile_bytes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn subfile(&self, file: usize, row: usize) -> &[u8] {
        &self.blocks[file][row]
    }

    /// The whole file, subfiles concatenated in row order.
    pub fn file_bytes(&self, file: usize) -> Vec<u8> {
        self.blocks[file].concat()
    }
}

// ---- placement ---------------------------------------------------------------

/// Which subfile rows each cache stores.
#[derive(Debug, Clone)]
pub struct Placement {
    star_rows: Vec<BTreeSet<usize>>,
}

impl Placement {
    pub fn from_pda(pda: &Pda) -> Placement {
        Placement { star_rows: (0..pda.cols()).map(|k| pda.star_rows(k)).collect() }
    }

    /// Per-cache placement of a user-level array. Users of one cache star the
    /// same rows (validated), so any user's column speaks for its cache.
    pub fn from_gpda(gpda: &GeneralizedPda) -> Placement {
        let mut star_rows = vec![BTreeSet::new(); gpda.num_caches()];
        for (user, &cache) in gpda.user_to_cache().iter().enumerate() {
            star_rows[cache] = gpda.star_rows(user);
        }
        Placement { star_rows }
    }

    pub fn num_caches(&self) -> usize {
        self.star_rows.len()
    }

    pub fn cache_rows(&self, cache: usize) -> &BTreeSet<usize> {
        &self.star_rows[cache]
    }

    /// Bytes one cache stores under a library: rows x files x subfile size.
    pub fn cache_bytes(&self, cache: usize, library: &Library) -> usize {
        self.star_rows[cache].len() * library.num_files() * library.subfile_bytes()
    }
}

// ---- delivery ------------------------------------------------------------------

/// One user's contribution to a message: subfile `row` of `file`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub user: usize,
    pub row: usize,
    pub file: usize,
}

/// One server message: the XOR of all terms under a (symbol, replica) tag.
#[derive(Debug, Clone)]
pub struct Transmission {
    pub symbol: usize,
    pub replica: usize,
    pub terms: Vec<Term>,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Unchecked,
    Recovered,
    Mismatch,
}

/// A complete delivery round.
#[derive(Debug, Clone)]
pub struct DeliveryRun {
    pub demand: Vec<usize>,
    pub transmissions: Vec<Transmission>,
    /// Messages sent over subpacketization; the realized delivery load.
    pub measured_load: LoadValue,
    /// Per-user decode outcome; filled in by [`simulate`].
    pub decode_status: Vec<DecodeStatus>,
}

/// Run the server side: one XOR message per distinct (symbol, replica) tag,
/// in ascending tag order.
pub fn deliver(gpda: &GeneralizedPda, library: &Library, demand: &[usize]) -> Result<DeliveryRun> {
    if library.subfiles_per_file() != gpda.rows() {
        return Err(Error::Dimension(format!(
            "library splits files into {} subfiles, array has {} rows",
            library.subfiles_per_file(),
            gpda.rows()
        )));
    }
    if demand.len() != gpda.cols() {
        return Err(Error::Dimension(format!(
            "{} demands for {} users",
            demand.len(),
            gpda.cols()
        )));
    }
    if let Some(&bad) = demand.iter().find(|&&d| d >= library.num_files()) {
        return Err(Error::Argument(format!(
            "demanded file {} of a {}-file library",
            bad + 1,
            library.num_files()
        )));
    }

    let mut tags: BTreeMap<(usize, usize), Vec<Term>> = BTreeMap::new();
    for j in 0..gpda.rows() {
        for (k, &file) in demand.iter().enumerate() {
            if let GCell::Pair(s, i) = gpda.cell(j, k) {
                tags.entry((s, i)).or_default().push(Term { user: k, row: j, file });
            }
        }
    }
    let transmissions: Vec<Transmission> = tags
        .into_iter()
        .map(|((symbol, replica), terms)| {
            let mut payload = vec![0u8; library.subfile_bytes()];
            for term in &terms {
                for (p, b) in payload.iter_mut().zip(library.subfile(term.file, term.row)) {
                    *p ^= b;
                }
            }
            Transmission { symbol, replica, terms, payload }
        })
        .collect();
    let measured_load = LoadValue::new(transmissions.len() as u64, gpda.rows() as u64);
    Ok(DeliveryRun {
        demand: demand.to_vec(),
        transmissions,
        measured_load,
        decode_status: vec![DecodeStatus::Unchecked; gpda.cols()],
    })
}

/// Reconstruct one user's demanded file from its cache and the messages.
///
/// Starred rows come straight from the cache. For every other row the user
/// looks up the message tagged with its cell's (symbol, replica) pair and
/// peels the other terms, each of which lies in one of its starred rows.
pub fn decode(
    run: &DeliveryRun,
    gpda: &GeneralizedPda,
    placement: &Placement,
    library: &Library,
    user: usize,
) -> Result<Vec<u8>> {
    let cached = placement.cache_rows(gpda.cache_of(user));
    let file = run.demand[user];
    let by_tag: BTreeMap<(usize, usize), &Transmission> = run
        .transmissions
        .iter()
        .map(|t| ((t.symbol, t.replica), t))
        .collect();

    let mut out = Vec::with_capacity(gpda.rows() * library.subfile_bytes());
    for j in 0..gpda.rows() {
        if cached.contains(&j) {
            out.extend_from_slice(library.subfile(file, j));
            continue;
        }
        let (s, i) = gpda
            .cell(j, user)
            .pair()
            .expect("non-starred cell holds a pair");
        let tx = by_tag.get(&(s, i)).ok_or_else(|| {
            Error::Argument(format!("no message for entry {}:{}", s + 1, i))
        })?;
        let mut block = tx.payload.clone();
        for term in &tx.terms {
            if term.user == user {
                continue;
            }
            assert!(
                cached.contains(&term.row),
                "cross cell ({},{}) is not cached by user {}",
                term.row + 1,
                term.user + 1,
                user + 1
            );
            for (p, b) in block.iter_mut().zip(library.subfile(term.file, term.row)) {
                *p ^= b;
            }
        }
        out.extend_from_slice(&block);
    }
    Ok(out)
}

/// Deliver and then decode for every user, checking each reconstruction
/// against the library byte for byte.
pub fn simulate(
    gpda: &GeneralizedPda,
    library: &Library,
    demand: &[usize],
) -> Result<DeliveryRun> {
    let placement = Placement::from_gpda(gpda);
    let mut run = deliver(gpda, library, demand)?;
    for user in 0..gpda.cols() {
        let decoded = decode(&run, gpda, &placement, library, user)?;
        run.decode_status[user] = if decoded == library.file_bytes(demand[user]) {
            DecodeStatus::Recovered
        } else {
            DecodeStatus::Mismatch
        };
    }
    Ok(run)
}

/// A reproducible random demand vector.
pub fn random_demand(num_users: usize, num_files: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_users).map(|_| rng.gen_range(0..num_files)).collect()
}
