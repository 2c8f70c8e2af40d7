"""
Message translation for the command-line interface, based on :mod:`gettext`.

    - ``_()``: translate a message with the active catalogue.
    - ``setup_locale()``: load the catalogue of a locale.

Without a catalogue for the requested locale, messages are returned unchanged.

Example:
    .. code-block:: python

        from omv_tools.ui.typer.i18n import setup_locale, _

        setup_locale(locale="es_ES", locales_dir="locales")
        print(_("Verification completed"))
"""

import gettext

_lang = gettext.NullTranslations()


def _(message: str) -> str:
    """
    Translate ``message`` using the currently active locale.

    :param message: Message to translate.
    :return: The translated string if available, otherwise ``message``.
    """
    return _lang.gettext(message)


def setup_locale(locale: str = "en_GB", locales_dir: str = "locales", domain: str = "messages") -> None:
    """
    Activate the catalogue of ``locale``.

    :param locale: Locale name, e.g. ``es_ES``.
    :param locales_dir: Directory holding ``<locale>/LC_MESSAGES/<domain>.mo``.
    :param domain: Base name of the ``.mo`` file.
    """
    global _lang
    _lang = gettext.translation(domain, localedir=locales_dir, languages=[locale], fallback=True)
