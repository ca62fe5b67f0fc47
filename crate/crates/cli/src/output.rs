use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use influence_core::manifest::RunManifest;

/// Outputs are rendered in memory first and written together with the
/// manifest; if any write fails the files already written are removed.
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        OutputSet { files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_owned(), bytes));
    }

    /// Renders one output through a writer callback.
    pub fn render(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Vec<u8>) -> influence_core::Result<()>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf).with_context(|| format!("rendering {name}"))?;
        self.add(name, buf);
        Ok(())
    }

    pub fn commit(self, dir: &Path, mut manifest: RunManifest) -> Result<Vec<PathBuf>> {
        for (name, bytes) in &self.files {
            manifest.add_output(name, bytes);
        }
        let mut files = self.files;
        files.push(("manifest.json".to_owned(), manifest.to_json()?));

        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        for (name, bytes) in &files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, bytes) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                let _ = fs::remove_file(&path);
                return Err(e).with_context(|| format!("writing {}", path.display()));
            }
            written.push(path);
        }
        Ok(written)
    }
}
