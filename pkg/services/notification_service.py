import locale
import logging
import re

from discord_webhook import DiscordWebhook, DiscordEmbed

# Discord embed limits
MAX_TITLE_LENGTH = 256
MAX_DESCRIPTION_LENGTH = 4096
MAX_FIELD_COUNT = 25
MAX_FIELD_VALUE_LENGTH = 1024


def shorten(text, max_length, placeholder="..."):
    """Cut text to max_length, on a word boundary when there is one."""
    text = str(text)
    if len(text) <= max_length:
        return text
    cut = text[:max_length - len(placeholder)]
    space = cut.rfind(" ")
    if space > 0:
        cut = cut[:space]
    return cut.rstrip() + placeholder


class NotificationService:
    def __init__(self, webhook_url, mention_users=None, footer="Backscatter MAC solver"):
        """
        Posts run summaries to a Discord webhook.
        """
        self.webhook_url = webhook_url
        self.mention_users = mention_users or []
        self.footer = footer

    def send(self, title, description, fields=None, color=None, mention_user=False):
        """
        Sends one embed. Fields beyond the Discord limit are dropped with a warning.
        Delivery problems are logged and never raised.
        """
        fields = dict(fields or {})
        if len(fields) > MAX_FIELD_COUNT:
            logging.warning(f"[notify] {len(fields)} fields exceed the embed limit, keeping {MAX_FIELD_COUNT}")
            fields = dict(list(fields.items())[:MAX_FIELD_COUNT])

        content = " ".join(f"<@{user}>" for user in self.mention_users) if mention_user and self.mention_users else None
        try:
            webhook = DiscordWebhook(url=self.webhook_url, content=content)
            embed = DiscordEmbed(
                title=shorten(title, MAX_TITLE_LENGTH),
                description=shorten(description, MAX_DESCRIPTION_LENGTH),
                color=color.lstrip("#") if color else None,
            )
            for name, value in fields.items():
                embed.add_embed_field(name=shorten(name, MAX_TITLE_LENGTH),
                                      value=shorten(value, MAX_FIELD_VALUE_LENGTH), inline=False)
            embed.set_footer(text=self.footer)
            embed.set_timestamp()
            webhook.add_embed(embed)
            response = webhook.execute()
            if getattr(response, "status_code", 200) >= 300:
                logging.error(f"[notify] Webhook answered {response.status_code} for '{title}'")
            else:
                logging.info(f"[notify] Notification sent: {title}")
        except Exception as e:
            logging.error(f"[notify] Failed to send notification: {e}")


class NotificationManager:
    def __init__(self, notification_service, lang=None):
        """
        :param notification_service: a NotificationService, or None to disable notifications
        """
        self.notif_service = notification_service

        if lang is None:
            lang = locale.getlocale()[0]
            self.lang = lang[:2] if lang else "en"
        else:
            self.lang = lang

        self.templates = {
            "run_start": {
                "en": {
                    "title": "Run started: {command}",
                    "description": "Scenario **{scenario}** with {n_st} secondary transmitter(s).",
                },
                "fr": {
                    "title": "Calcul démarré : {command}",
                    "description": "Scénario **{scenario}** avec {n_st} émetteur(s) secondaire(s).",
                },
                "color": "#0dcaf0",
            },
            "run_complete": {
                "en": {
                    "title": "Run finished: {command}",
                    "description": "Completed in {elapsed}.",
                },
                "fr": {
                    "title": "Calcul terminé : {command}",
                    "description": "Terminé en {elapsed}.",
                },
                "color": "#20c997",
            },
            "scenario_infeasible": {
                "en": {
                    "title": "Infeasible scenario: {command}",
                    "description": "No allocation meets every QoS and power constraint. {detail}",
                },
                "fr": {
                    "title": "Scénario infaisable : {command}",
                    "description": "Aucune allocation ne respecte toutes les contraintes de QoS et de puissance. {detail}",
                },
                "color": "#ffc107",
                "mention_user": True,
            },
        }

    def _check_required_format_keys(self, text, args):
        placeholders = set(re.findall(r"{([a-zA-Z0-9_]+)}", text))
        missing = placeholders - set(args or {})
        if missing:
            raise KeyError(f"Missing template arguments: {', '.join(sorted(missing))}")

    def render(self, key, lang=None, args=None):
        """Returns the localized (title, description) of a template."""
        template = self.templates.get(key)
        if not template:
            raise ValueError(f"Notification template not found for key '{key}'")
        localized = template.get(lang or self.lang) or template["en"]
        args = args or {}
        self._check_required_format_keys(localized["title"], args)
        self._check_required_format_keys(localized["description"], args)
        return localized["title"].format(**args), localized["description"].format(**args)

    def send(self, key, fields=None, lang=None, args=None):
        title, description = self.render(key, lang=lang, args=args)
        if self.notif_service is None:
            return
        template = self.templates[key]
        self.notif_service.send(
            title=title,
            description=description,
            fields=fields,
            color=template.get("color"),
            mention_user=template.get("mention_user", False),
        )
