//! On-disk image cache: `cache/<pano_id>/<size>.jpg` plus a metadata
//! sidecar. Writes go to a temp file first and are atomically renamed so
//! concurrent writers cannot expose partial images.

use std::path::{Path, PathBuf};

use crate::provider::{ImageMetadata, ImageSize};
use crate::Result;

#[derive(Debug, Clone)]
pub struct ImageCache {
    root: PathBuf,
}

impl ImageCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn image_path(&self, pano_id: &str, size: ImageSize) -> PathBuf {
        self.root.join(pano_id).join(format!("{}.jpg", size.label()))
    }

    pub fn sidecar_path(&self, pano_id: &str) -> PathBuf {
        self.root.join(pano_id).join("metadata.json")
    }

    pub fn lookup(&self, pano_id: &str, size: ImageSize) -> Option<PathBuf> {
        let path = self.image_path(pano_id, size);
        path.is_file().then_some(path)
    }

    pub fn store(
        &self,
        metadata: &ImageMetadata,
        size: ImageSize,
        bytes: &[u8],
    ) -> Result<PathBuf> {
        let dir = self.root.join(&metadata.pano_id);
        std::fs::create_dir_all(&dir)?;

        let final_path = self.image_path(&metadata.pano_id, size);
        atomic_write(&final_path, bytes)?;

        let sidecar = serde_json::to_vec_pretty(metadata)
            .expect("metadata serialization cannot fail");
        atomic_write(&self.sidecar_path(&metadata.pano_id), &sidecar)?;
        Ok(final_path)
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().expect("cache paths always have a parent");
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        path.file_name().and_then(|n| n.to_str()).unwrap_or("part")
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::{CaptureDate, ImageSource};

    fn metadata() -> ImageMetadata {
        ImageMetadata {
            pano_id: "p123".into(),
            capture_date: CaptureDate { year: 2021, month: 6 },
            source: ImageSource::Official,
        }
    }

    #[test]
    fn store_then_lookup_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ImageCache::new(dir.path());
        let size = ImageSize::ACQUISITION;
        assert!(cache.lookup("p123", size).is_none());

        let path = cache.store(&metadata(), size, b"jpeg-bytes").unwrap();
        assert_eq!(path, cache.image_path("p123", size));
        assert_eq!(std::fs::read(&path).unwrap(), b"jpeg-bytes");
        assert_eq!(cache.lookup("p123", size), Some(path));

        let sidecar: ImageMetadata =
            serde_json::from_slice(&std::fs::read(cache.sidecar_path("p123")).unwrap()).unwrap();
        assert_eq!(sidecar, metadata());
    }

    #[test]
    fn size_keyed_entries_do_not_collide() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ImageCache::new(dir.path());
        let small = ImageSize { width: 224, height: 224 };
        cache.store(&metadata(), ImageSize::ACQUISITION, b"big").unwrap();
        cache.store(&metadata(), small, b"small").unwrap();
        assert_eq!(std::fs::read(cache.image_path("p123", ImageSize::ACQUISITION)).unwrap(), b"big");
        assert_eq!(std::fs::read(cache.image_path("p123", small)).unwrap(), b"small");
    }
}
