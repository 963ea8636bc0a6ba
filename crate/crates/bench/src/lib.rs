//! Inputs shared by the criterion benches.

use bemr::synth::calgary_like_corpus;

/// Named corpus files: the directory in `BEMR_CALGARY_DIR` when set,
/// otherwise the synthetic stand-ins.
pub fn corpus() -> Vec<(String, Vec<u8>)> {
    if let Some(dir) = std::env::var_os("BEMR_CALGARY_DIR") {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
            .expect("BEMR_CALGARY_DIR is readable")
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .map(|p| {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                (name, std::fs::read(&p).expect("corpus file is readable"))
            })
            .collect();
        files.sort();
        return files;
    }
    calgary_like_corpus()
        .into_iter()
        .map(|f| (f.name.to_string(), f.data))
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn synthetic_corpus_has_eight_files() {
        if std::env::var_os("BEMR_CALGARY_DIR").is_none() {
            assert_eq!(super::corpus().len(), 8);
        }
    }
}
