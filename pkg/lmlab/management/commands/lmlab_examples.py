import json
import shutil
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from lmlab.documents import bundled_fixtures


class Command(BaseCommand):
    help = "Lists, prints or copies the bundled golden problem documents."
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("--show", metavar="NAME", help="Print one fixture")
        parser.add_argument("--output-dir", metavar="DIR", help="Copy every fixture into DIR")

    def handle(self, *args, **options):
        fixtures = {path.stem: path for path in bundled_fixtures()}

        if options["show"]:
            name = Path(options["show"]).stem
            if name not in fixtures:
                raise CommandError(
                    "Unknown fixture %r; choose from %s" % (name, ", ".join(fixtures)), returncode=2
                )
            self.stdout.write(fixtures[name].read_text(encoding="utf-8"))
            return

        if options["output_dir"]:
            target = Path(options["output_dir"])
            target.mkdir(parents=True, exist_ok=True)
            for path in fixtures.values():
                shutil.copyfile(path, target / path.name)
                self.stdout.write(str(target / path.name))
            return

        for stem, path in fixtures.items():
            document = json.loads(path.read_text(encoding="utf-8"))
            self.stdout.write("%s: %s" % (stem, document.get("name", "")))
