"""
Accès fichiers générique : résolution des chemins et écriture atomique
(fichier temporaire dans le même dossier puis renommage)
"""

import os
import tempfile
from pathlib import Path
from typing import Generic, Optional, TypeVar

from app.core.exceptions import StorageError

T = TypeVar("T")


class BaseRepository(Generic[T]):
    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else None

    def resolve(self, path) -> Path:
        path = Path(path)
        if path.is_absolute() or self.root is None:
            return path
        return self.root / path

    def exists(self, path) -> bool:
        return self.resolve(path).is_file()

    def read_text(self, path) -> str:
        target = self.resolve(path)
        try:
            return target.read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageError(f"Lecture impossible : {target} ({exc.strerror})", path=str(target)) from exc

    def write_text(self, path, text: str) -> Path:
        """
        Écrit text de façon atomique

        Raises:
            StorageError: si le dossier cible n'est pas accessible en écriture
        """
        target = self.resolve(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(text)
                os.replace(tmp, target)
            except BaseException:
                Path(tmp).unlink(missing_ok=True)
                raise
        except OSError as exc:
            raise StorageError(f"Écriture impossible : {target} ({exc.strerror})", path=str(target)) from exc
        return target

    def load(self, path) -> T:
        raise NotImplementedError

    def save(self, obj: T, path) -> Path:
        raise NotImplementedError
