use std::fs;
use std::path::{Component, Path, PathBuf};

use crate::error::CliError;

/// The only directory subcommands may write into.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::invalid(format!("cannot create output directory {}: {e}", dir.display())))?;
        let root = dir
            .canonicalize()
            .map_err(|e| CliError::invalid(format!("cannot resolve output directory {}: {e}", dir.display())))?;
        Ok(OutDir { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Resolves `path` against the root, rejecting anything that ends up
    /// outside it.
    pub fn resolve(&self, path: &Path) -> Result<PathBuf, CliError> {
        let joined = if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.root.join(path)
        };
        let mut clean = PathBuf::new();
        for part in joined.components() {
            match part {
                Component::ParentDir => {
                    clean.pop();
                }
                Component::CurDir => {}
                other => clean.push(other),
            }
        }
        if !clean.starts_with(&self.root) || clean == self.root {
            return Err(CliError::invalid(format!(
                "{} is outside the output directory {}",
                path.display(),
                self.root.display()
            )));
        }
        Ok(clean)
    }

    pub fn write(&self, path: &Path, contents: &[u8]) -> Result<PathBuf, CliError> {
        let target = self.resolve(path)?;
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
        }
        fs::write(&target, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", target.display())))?;
        log::info!("wrote {}", target.display());
        Ok(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_are_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let out = OutDir::create(tmp.path()).unwrap();
        assert!(out.resolve(Path::new("a/b.txt")).is_ok());
        assert!(out.resolve(Path::new("a/../b.txt")).is_ok());
        assert!(out.resolve(Path::new("../b.txt")).is_err());
        assert!(out.resolve(Path::new("a/../../b.txt")).is_err());
        assert!(out.resolve(Path::new("/etc/passwd")).is_err());
        assert!(out.resolve(Path::new(".")).is_err());
        assert!(out.resolve(&out.root().join("inside.txt")).is_ok());
    }
}
